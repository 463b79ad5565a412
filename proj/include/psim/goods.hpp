#pragma once

#include <map>
#include <string>
#include <vector>

#include "psim/errors.hpp"
#include "psim/types.hpp"

namespace psim {

struct Good {
  std::string name;
  bool durable = true;
  double cost = 1.0;     // production effort in value units, seeds posted prices
  double utility = 1.0;  // latent objective value per unit
};

class GoodsCatalog {
 public:
  GoodId add(Good g);
  const Good& at(GoodId id) const;
  GoodId find(const std::string& name) const;  // kNoGood if absent
  std::size_t size() const { return goods_.size(); }
  bool valid(GoodId id) const {
    return id >= 0 && static_cast<std::size_t>(id) < goods_.size();
  }

  auto begin() const { return goods_.begin(); }
  auto end() const { return goods_.end(); }

 private:
  std::vector<Good> goods_;
};

// quantities by good; trades and inventories use doubles, instruments do not
using Bundle = std::map<GoodId, double>;

}  // namespace psim
