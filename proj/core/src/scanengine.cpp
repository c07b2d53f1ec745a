#include "gaplabel/scanengine.hpp"

#include "gaplabel/error.hpp"

namespace gaplabel {

OrbitCache::OrbitCache(const OperatorModel& model, BasePoint theta0, int length) : start_(std::move(theta0)) {
  if (length < 0) throw Error(ErrorKind::InvalidInput, "orbit length must be nonnegative");
  points_.reserve(static_cast<std::size_t>(length) + 1);
  blocks_.reserve(static_cast<std::size_t>(length) + 1);
  const BaseDynamics& base = model.base();
  for (int n = 0; n <= length; ++n) {
    // Rotations are evaluated in closed form so that rounding does not accumulate.
    points_.push_back(base.kind() == BaseKind::TorusRotation ? base.iterate(start_, n)
                      : n == 0                               ? base.reduce(start_)
                                                             : base.advance(points_.back()));
    blocks_.push_back(model.f(points_.back()));
  }
}

std::span<const ComplexMatrix> OrbitCache::range(int first, int count) const {
  if (first < 0 || count < 0 || first + count > static_cast<int>(blocks_.size()))
    throw Error(ErrorKind::InvalidInput, "orbit cache range out of bounds");
  return {blocks_.data() + first, static_cast<std::size_t>(count)};
}

double OrbitCache::verify(const OperatorModel& model, double fraction) const {
  const std::size_t stride =
      std::max<std::size_t>(1, static_cast<std::size_t>(1.0 / std::max(fraction, 1e-9)));
  double worst = 0.0;
  for (std::size_t n = 0; n < blocks_.size(); n += stride)
    worst = std::max(worst, (model.f(points_[n]) - blocks_[n]).cwiseAbs().maxCoeff());
  return worst;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

CounterRng::result_type CounterRng::at(std::uint64_t counter) const {
  return mix64(mix64(mix64(seed_) ^ key_) ^ counter);
}

}  // namespace gaplabel
