#include "urbangen/assets.hpp"

#include <stdexcept>

namespace urbangen {

namespace {

AssetCategory MakeCategory(const std::string& name,
                           const std::vector<std::pair<std::string, int>>& groups)
{
  AssetCategory cat;
  cat.name = name;
  int next = 0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    AssetGroup group;
    group.id = name + "/" + groups[g].first;
    group.first = next;
    group.count = groups[g].second;
    for (int i = 0; i < groups[g].second; ++i) {
      AssetEntry e;
      e.id = group.id + "_" + (i < 9 ? "0" : "") + std::to_string(i + 1);
      e.group = static_cast<int>(g);
      cat.entries.push_back(e);
      ++next;
    }
    cat.groups.push_back(group);
  }
  return cat;
}

AssetCategory MakeVehicleCategory()
{
  // Leaves are model/coloring combinations; groups are the two models.
  AssetCategory cat;
  cat.name = "vehicle";
  const std::pair<std::string, std::vector<std::string>> models[2] = {
      {"sedan", {"red", "blue", "white"}},
      {"van", {"yellow", "green", "black", "silver"}},
  };
  int next = 0;
  for (int m = 0; m < 2; ++m) {
    AssetGroup group;
    group.id = cat.name + "/" + models[m].first;
    group.first = next;
    group.count = static_cast<int>(models[m].second.size());
    for (const std::string& color : models[m].second) {
      cat.entries.push_back(AssetEntry{group.id + "_" + color, m});
      ++next;
    }
    cat.groups.push_back(group);
  }
  return cat;
}

AssetCatalog MakeCatalog()
{
  AssetCatalog c;
  c.categories[0] = MakeCategory("building", {{"residential", 4}, {"office", 3}, {"shop", 3}});
  c.categories[1] = MakeCategory("tree", {{"birch", 2}, {"oak", 2}, {"pine", 3}});
  c.categories[2] = MakeCategory("lamp", {{"standard", 1}});
  c.categories[3] = MakeCategory("human", {{"adult", 12}, {"child", 4}, {"senior", 3}});
  c.categories[4] = MakeVehicleCategory();
  c.street = MakeCategory("street", {{"straight", 1}, {"curve", 2}, {"crossing", 3}});
  return c;
}

}  // namespace

const char* CategoryName(ObjectCategory c)
{
  switch (c) {
  case ObjectCategory::Building: return "building";
  case ObjectCategory::Tree: return "tree";
  case ObjectCategory::Lamp: return "lamp";
  case ObjectCategory::Human: return "human";
  case ObjectCategory::Vehicle: return "vehicle";
  }
  return "?";
}

const AssetCatalog& BuiltinCatalog()
{
  static const AssetCatalog catalog = MakeCatalog();
  return catalog;
}

std::vector<double> ResolveAssetWeights(const AssetCategory& category,
                                        const std::map<std::string, double>& mapping)
{
  const std::size_t n = category.entries.size();
  if (mapping.empty()) return std::vector<double>(n, 1.0);

  for (const auto& [id, w] : mapping) {
    if (w < 0) throw std::runtime_error("negative weight for identifier: " + id);
    if (id == category.name) continue;
    bool known = false;
    for (const auto& g : category.groups) {
      if (id == g.id) known = true;
    }
    for (const auto& e : category.entries) {
      if (id == e.id) known = true;
    }
    if (!known) throw std::runtime_error("unknown asset identifier: " + id);
  }

  std::vector<double> weights(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const AssetEntry& entry = category.entries[i];
    const AssetGroup& group = category.groups[entry.group];
    // Most specific mention wins: entry over group over category.
    if (auto it = mapping.find(entry.id); it != mapping.end()) {
      weights[i] = it->second;
    } else if (auto git = mapping.find(group.id); git != mapping.end()) {
      weights[i] = git->second / static_cast<double>(group.count);
    } else if (auto cit = mapping.find(category.name); cit != mapping.end()) {
      weights[i] = cit->second / static_cast<double>(n);
    }
  }
  return weights;
}

}  // namespace urbangen
