#include "signrec/inventory.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <unordered_set>

#include "signrec/errors.hpp"
#include "table_parse.hpp"

namespace signrec {

namespace {

std::string lower(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

int PhonemeType::value_id(const std::string& value_name) const {
  auto it = std::lower_bound(value_names.begin(), value_names.end(), value_name);
  if (it == value_names.end() || *it != value_name) return kMissing;
  return static_cast<int>(it - value_names.begin());
}

PhonemeSubset::PhonemeSubset(std::vector<int> ids) : ids_(std::move(ids)) {
  std::sort(ids_.begin(), ids_.end());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (ids_[i] < 0) throw DataError("negative phoneme type id in subset");
    if (i > 0 && ids_[i] == ids_[i - 1])
      throw DataError("duplicate phoneme type id in subset: " + std::to_string(ids_[i]));
  }
}

bool PhonemeSubset::contains(int type_id) const {
  return std::binary_search(ids_.begin(), ids_.end(), type_id);
}

PhonemeSubset PhonemeSubset::with(int type_id) const {
  std::vector<int> ids = ids_;
  ids.push_back(type_id);
  return PhonemeSubset(std::move(ids));
}

PhonemeInventory::PhonemeInventory(std::vector<PhonemeType> types)
    : types_(std::move(types)) {
  std::unordered_set<std::string> names;
  for (std::size_t i = 0; i < types_.size(); ++i) {
    const PhonemeType& t = types_[i];
    if (t.id != static_cast<int>(i))
      throw DataError("phoneme type ids must be contiguous from 0");
    if (t.cardinality() < 2)
      throw DataError("phoneme type '" + t.name + "' has fewer than 2 values");
    if (!names.insert(lower(t.name)).second)
      throw DataError("duplicate phoneme type name: " + t.name);
  }
}

int PhonemeInventory::find_type(const std::string& name) const {
  const std::string key = lower(detail::trim(name));
  for (const PhonemeType& t : types_)
    if (lower(t.name) == key) return t.id;
  return -1;
}

int PhonemeInventory::total_value_count() const {
  int total = 0;
  for (const PhonemeType& t : types_) total += t.cardinality();
  return total;
}

PhonemeSubset PhonemeInventory::all_types() const {
  std::vector<int> ids(types_.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
  return PhonemeSubset(std::move(ids));
}

PhonemeSubset PhonemeInventory::subset_from_names(
    const std::vector<std::string>& names) const {
  std::vector<int> ids;
  for (const std::string& raw : names) {
    const std::string name = detail::trim(raw);
    int id = find_type(name);
    if (id < 0) {
      // fall back to a decimal type id
      try {
        std::size_t pos = 0;
        id = std::stoi(name, &pos);
        if (pos != name.size() || id < 0 || id >= type_count()) id = -1;
      } catch (...) {
        id = -1;
      }
    }
    if (id < 0) throw DataError("unknown phoneme type: " + raw);
    ids.push_back(id);
  }
  return PhonemeSubset(std::move(ids));
}

bool PhonemeInventory::operator==(const PhonemeInventory& other) const {
  if (types_.size() != other.types_.size()) return false;
  for (std::size_t i = 0; i < types_.size(); ++i) {
    if (types_[i].name != other.types_[i].name) return false;
    if (types_[i].value_names != other.types_[i].value_names) return false;
  }
  return true;
}

namespace detail {

// Locates the gloss column (case-insensitive) and induces one PhonemeType per
// remaining column. Shared with the lexicon loader.
InventoryScan scan_inventory(const Table& table) {
  InventoryScan scan;
  scan.gloss_column = -1;
  std::unordered_set<std::string> seen;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    const std::string name = table.header[c];
    if (name.empty()) throw DataError("empty column name in header");
    if (!seen.insert(lower(name)).second)
      throw DataError("duplicate column name: " + name);
    if (scan.gloss_column < 0 && lower(name) == "gloss")
      scan.gloss_column = static_cast<int>(c);
  }
  if (scan.gloss_column < 0) throw DataError("no 'gloss' column in header");
  if (table.header.size() < 2) throw DataError("no phoneme columns in header");

  std::vector<std::set<std::string>> values(table.header.size());
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size())
      throw DataError("row arity mismatch: expected " +
                      std::to_string(table.header.size()) + " cells, got " +
                      std::to_string(row.size()));
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (static_cast<int>(c) == scan.gloss_column) continue;
      if (row[c] == "-1" || row[c].empty()) continue;  // missing marker
      values[c].insert(row[c]);
    }
  }

  std::vector<PhonemeType> types;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (static_cast<int>(c) == scan.gloss_column) continue;
    PhonemeType t;
    t.id = static_cast<int>(types.size());
    t.name = table.header[c];
    t.value_names.assign(values[c].begin(), values[c].end());  // already sorted
    if (t.cardinality() < 2)
      throw DataError("column '" + t.name + "' has fewer than 2 distinct values");
    scan.type_columns.push_back(static_cast<int>(c));
    types.push_back(std::move(t));
  }
  scan.inventory = PhonemeInventory(std::move(types));
  return scan;
}

}  // namespace detail

PhonemeInventory load_inventory(const std::string& path, char delimiter) {
  detail::Table table = detail::parse_table_file(path, delimiter);
  return detail::scan_inventory(table).inventory;
}

std::vector<PhonemeSubset> all_subsets_of_size(int type_count, int n) {
  if (n < 0 || n > type_count)
    throw DataError("subset size " + std::to_string(n) + " out of range [0, " +
                    std::to_string(type_count) + "]");
  std::vector<PhonemeSubset> out;
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  while (true) {
    out.push_back(PhonemeSubset(idx));
    int i = n - 1;
    while (i >= 0 && idx[i] == type_count - n + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < n; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

std::vector<PhonemeSubset> all_subsets_of_size(const PhonemeInventory& inventory, int n) {
  return all_subsets_of_size(inventory.type_count(), n);
}

void validate_asllex_shape(const PhonemeInventory& inventory) {
  if (inventory.type_count() != 16)
    throw DataError("expected 16 phoneme types, found " +
                    std::to_string(inventory.type_count()));
  const struct {
    const char* name;
    int cardinality;
  } expected[] = {
      {"Minor Location", 37}, {"Dominant Handshape", 49}, {"Path Movement", 8}};
  for (const auto& e : expected) {
    int id = inventory.find_type(e.name);
    if (id < 0) throw DataError(std::string("missing phoneme type: ") + e.name);
    if (inventory.type(id).cardinality() != e.cardinality)
      throw DataError(std::string(e.name) + " has " +
                      std::to_string(inventory.type(id).cardinality()) +
                      " values, expected " + std::to_string(e.cardinality));
  }
  if (inventory.total_value_count() >= 200)
    throw DataError("inventory has " + std::to_string(inventory.total_value_count()) +
                    " values in total, expected < 200");
}

}  // namespace signrec
