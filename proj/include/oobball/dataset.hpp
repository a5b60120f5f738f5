#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "oobball/space.hpp"

namespace oobball {

// Paired sample: predictors stored per product-space component, responses in one space.
class Dataset {
 public:
  Dataset(ProductSpace predictor_space, SpaceDescriptor response_space);

  const ProductSpace& predictor_space() const { return predictor_space_; }
  const SpaceDescriptor& response_space() const { return responses_.space(); }
  std::size_t size() const { return responses_.size(); }

  const PointSet& feature(std::size_t j) const { return features_[j]; }
  const PointSet& responses() const { return responses_; }

  // Flat concatenated predictor coordinates of observation i.
  std::vector<double> predictor(std::size_t i) const;

  void add(std::span<const double> predictor, std::span<const double> response);
  Dataset subset(std::span<const std::size_t> indices) const;
  void reserve(std::size_t n);

  // Validates every point; messages carry the observation index.
  void validate() const;

 private:
  ProductSpace predictor_space_;
  std::vector<PointSet> features_;
  PointSet responses_;
};

}  // namespace oobball
