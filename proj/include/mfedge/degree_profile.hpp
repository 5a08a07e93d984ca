#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace mfedge {

// Degree distribution of the collaboration graph: a finite ascending support
// {k_min..k_max} with a pmf p(k).  Derived quantities: mean degree k_bar and
// the spread ratios delta1 = k_max/k_bar >= 1 >= delta2 = k_min/k_bar > 0.
class DegreeProfile {
 public:
  DegreeProfile(std::vector<int> support, std::vector<double> pmf)
      : support_(std::move(support)), pmf_(std::move(pmf)) {
    if (support_.empty()) throw std::invalid_argument("DegreeProfile: empty support");
    if (support_.size() != pmf_.size())
      throw std::invalid_argument("DegreeProfile: support/pmf size mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < support_.size(); ++i) {
      if (support_[i] < 1) throw std::invalid_argument("DegreeProfile: degrees must be >= 1");
      if (i > 0 && support_[i] <= support_[i - 1])
        throw std::invalid_argument("DegreeProfile: support must be strictly ascending");
      if (!(pmf_[i] >= 0.0) || !std::isfinite(pmf_[i]))
        throw std::invalid_argument("DegreeProfile: pmf entries must be nonnegative");
      sum += pmf_[i];
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw std::invalid_argument("DegreeProfile: pmf must sum to 1, got " + std::to_string(sum));
    mean_ = 0.0;
    for (std::size_t i = 0; i < support_.size(); ++i) mean_ += pmf_[i] * support_[i];
  }

  static DegreeProfile uniform(int k_min, int k_max) {
    std::vector<int> sup;
    for (int k = k_min; k <= k_max; ++k) sup.push_back(k);
    return DegreeProfile(sup, std::vector<double>(sup.size(), 1.0 / sup.size()));
  }

  static DegreeProfile single(int k) { return DegreeProfile({k}, {1.0}); }

  const std::vector<int>& support() const { return support_; }
  const std::vector<double>& pmf() const { return pmf_; }
  std::size_t size() const { return support_.size(); }
  int k_min() const { return support_.front(); }
  int k_max() const { return support_.back(); }
  double mean_degree() const { return mean_; }
  double delta1() const { return support_.back() / mean_; }
  double delta2() const { return support_.front() / mean_; }

 private:
  std::vector<int> support_;
  std::vector<double> pmf_;
  double mean_;
};

}  // namespace mfedge
