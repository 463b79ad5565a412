#include "psim/goods.hpp"

namespace psim {

GoodId GoodsCatalog::add(Good g) {
  if (g.name.empty()) fail(Err::InvalidConfig, "good needs a name");
  if (find(g.name) != kNoGood) fail(Err::InvalidConfig, "duplicate good " + g.name);
  if (g.cost <= 0.0) fail(Err::RangeViolation, "good " + g.name + " cost must be > 0");
  if (g.utility <= 0.0) fail(Err::RangeViolation, "good " + g.name + " utility must be > 0");
  goods_.push_back(std::move(g));
  return static_cast<GoodId>(goods_.size() - 1);
}

const Good& GoodsCatalog::at(GoodId id) const {
  if (!valid(id)) fail(Err::UnknownGood, "good id " + std::to_string(id));
  return goods_[static_cast<std::size_t>(id)];
}

GoodId GoodsCatalog::find(const std::string& name) const {
  for (std::size_t i = 0; i < goods_.size(); ++i)
    if (goods_[i].name == name) return static_cast<GoodId>(i);
  return kNoGood;
}

}  // namespace psim
