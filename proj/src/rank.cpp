#include "cac/rank.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace cac {

std::vector<double> singular_values(const Matrix& m) {
    if (m.rows() == 0 || m.cols() == 0) return {};
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const Eigen::Map<const RowMajor> view(m.data().data(), static_cast<Eigen::Index>(m.rows()),
                                          static_cast<Eigen::Index>(m.cols()));
    const Eigen::MatrixXd dense = view;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(dense);
    const auto& s = svd.singularValues();
    std::vector<double> out(s.data(), s.data() + s.size());
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

double rank_threshold(const Matrix& m, std::span<const double> sigma, const RankPolicy& policy) {
    if (sigma.empty() || sigma.front() == 0.0) return 0.0;
    return policy.rel_tol * sigma.front() * static_cast<double>(std::max(m.rows(), m.cols()));
}

std::size_t numerical_rank(const Matrix& m, const RankPolicy& policy) {
    const auto sigma = singular_values(m);
    if (sigma.empty() || sigma.front() == 0.0) return 0;
    const double tau = rank_threshold(m, sigma, policy);
    return static_cast<std::size_t>(
        std::count_if(sigma.begin(), sigma.end(), [tau](double s) { return s > tau; }));
}

std::size_t cp_rank_lower_bound(const DenseTensor& a, const RankPolicy& policy) {
    return numerical_rank(matricize(a), policy);
}

double low_rank_residual(std::span<const double> sigma, std::size_t z) {
    double tail = 0.0;
    for (std::size_t i = z; i < sigma.size(); ++i) tail += sigma[i] * sigma[i];
    return std::sqrt(tail);
}

double low_rank_residual(const Matrix& m, std::size_t z) {
    const auto sigma = singular_values(m);
    return low_rank_residual(sigma, z);
}

}  // namespace cac
