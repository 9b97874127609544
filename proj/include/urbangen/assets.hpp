#pragma once

#include <map>
#include <string>
#include <vector>

namespace urbangen {

// Canonical object-category order used by existence vectors, count vectors and
// semantic labels throughout: building, tree, lamp, human, vehicle.
enum class ObjectCategory { Building = 0, Tree = 1, Lamp = 2, Human = 3, Vehicle = 4 };
constexpr int kObjectCategoryCount = 5;

const char* CategoryName(ObjectCategory c);

struct AssetGroup {
  std::string id;  // e.g. "tree/birch"
  int first = 0;   // index of the group's first instance in the catalog order
  int count = 0;
};

struct AssetEntry {
  std::string id;  // e.g. "tree/birch_01"
  int group = 0;
};

// One category's asset listing: a two-level hierarchy of groups and leaf
// instances. Vehicle entries are (model, coloring) leaves grouped per model.
struct AssetCategory {
  std::string name;
  std::vector<AssetGroup> groups;
  std::vector<AssetEntry> entries;
};

struct AssetCatalog {
  AssetCategory categories[kObjectCategoryCount];
  // Street layouts live in the same registry shape: groups are layout families
  // (straight, curve, crossing) and entries are the concrete layouts.
  AssetCategory street;

  const AssetCategory& Of(ObjectCategory c) const { return categories[static_cast<int>(c)]; }
};

// The built-in catalog: 10 buildings, 7 trees, 1 lamp, 19 humans, 7 vehicle
// colorings over 2 models, 6 street layouts.
const AssetCatalog& BuiltinCatalog();

// Expands an identifier -> weight mapping into per-entry weights. A weight on
// the category name or a group id splits equally over the member entries; an
// entry-level identifier overrides anything broader. Unknown identifiers throw
// std::runtime_error naming the offender. An empty mapping means equal weights.
std::vector<double> ResolveAssetWeights(const AssetCategory& category,
                                        const std::map<std::string, double>& mapping);

}  // namespace urbangen
