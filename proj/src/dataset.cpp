#include "oobball/dataset.hpp"

#include <string>

#include "oobball/errors.hpp"

namespace oobball {

Dataset::Dataset(ProductSpace predictor_space, SpaceDescriptor response_space)
    : predictor_space_(std::move(predictor_space)), responses_(response_space) {
  for (const auto& c : predictor_space_.components()) features_.emplace_back(c);
}

std::vector<double> Dataset::predictor(std::size_t i) const {
  std::vector<double> x;
  x.reserve(predictor_space_.coordinate_count());
  for (const auto& f : features_) {
    auto p = f[i];
    x.insert(x.end(), p.begin(), p.end());
  }
  return x;
}

void Dataset::add(std::span<const double> predictor, std::span<const double> response) {
  if (predictor.size() != predictor_space_.coordinate_count())
    throw DescriptorMismatch("predictor has " + std::to_string(predictor.size()) + " coordinates, " +
                             predictor_space_.to_string() + " needs " +
                             std::to_string(predictor_space_.coordinate_count()));
  if (response.size() != responses_.dim())
    throw DescriptorMismatch("response has " + std::to_string(response.size()) + " coordinates, " +
                             responses_.space().to_string() + " needs " + std::to_string(responses_.dim()));
  for (std::size_t j = 0; j < features_.size(); ++j)
    features_[j].push_back(predictor.subspan(predictor_space_.offset(j), features_[j].dim()));
  responses_.push_back(response);
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out(predictor_space_, responses_.space());
  out.reserve(indices.size());
  for (auto i : indices) {
    if (i >= size()) throw InvalidArgument("subset index out of range");
    for (std::size_t j = 0; j < features_.size(); ++j) out.features_[j].push_back(features_[j][i]);
    out.responses_.push_back(responses_[i]);
  }
  return out;
}

void Dataset::reserve(std::size_t n) {
  for (auto& f : features_) f.reserve(n);
  responses_.reserve(n);
}

void Dataset::validate() const {
  for (std::size_t i = 0; i < size(); ++i) {
    try {
      for (std::size_t j = 0; j < features_.size(); ++j) validate_point(features_[j].space(), features_[j][i]);
      validate_point(responses_.space(), responses_[i]);
    } catch (const InvalidPoint& e) {
      throw InvalidPoint("observation " + std::to_string(i) + ": " + e.what());
    }
  }
}

}  // namespace oobball
