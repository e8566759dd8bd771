#pragma once

#include <string>
#include <vector>

namespace signrec {

// Sentinel for an absent phoneme label. Serialized as the literal "-1".
constexpr int kMissing = -1;

struct PhonemeValue {
  int type_id = 0;
  int value_id = kMissing;
  bool missing() const { return value_id == kMissing; }
};

// One category of phonemes (e.g. a handshape column) and its legal values.
// value_names is sorted lexicographically; the index is the value id.
struct PhonemeType {
  int id = 0;
  std::string name;
  std::vector<std::string> value_names;

  int cardinality() const { return static_cast<int>(value_names.size()); }
  // Returns kMissing when the name is unknown.
  int value_id(const std::string& value_name) const;
};

// An ordered set of phoneme type ids. Iteration is always ascending.
class PhonemeSubset {
 public:
  PhonemeSubset() = default;
  // Sorts the ids; throws DataError on duplicates or negatives.
  explicit PhonemeSubset(std::vector<int> ids);

  int size() const { return static_cast<int>(ids_.size()); }
  bool empty() const { return ids_.empty(); }
  bool contains(int type_id) const;
  const std::vector<int>& ids() const { return ids_; }
  PhonemeSubset with(int type_id) const;

  bool operator==(const PhonemeSubset& other) const { return ids_ == other.ids_; }
  bool operator<(const PhonemeSubset& other) const { return ids_ < other.ids_; }

  auto begin() const { return ids_.begin(); }
  auto end() const { return ids_.end(); }

 private:
  std::vector<int> ids_;
};

class PhonemeInventory {
 public:
  PhonemeInventory() = default;
  // Throws DataError unless every type has cardinality >= 2 and names are
  // unique with contiguous 0-based ids.
  explicit PhonemeInventory(std::vector<PhonemeType> types);

  int type_count() const { return static_cast<int>(types_.size()); }
  const PhonemeType& type(int id) const { return types_.at(id); }
  const std::vector<PhonemeType>& types() const { return types_; }
  // Case-insensitive lookup; returns -1 when not found.
  int find_type(const std::string& name) const;
  int total_value_count() const;
  PhonemeSubset all_types() const;
  // Resolves names or decimal ids, comma-separated input split by caller.
  PhonemeSubset subset_from_names(const std::vector<std::string>& names) const;

  bool operator==(const PhonemeInventory& other) const;

 private:
  std::vector<PhonemeType> types_;
};

// Induces an inventory from a delimiter-separated file: one gloss column plus
// one column per phoneme type. Cell values are names or "-1" for missing.
// delimiter '\0' auto-detects between comma and tab from the header line.
PhonemeInventory load_inventory(const std::string& path, char delimiter = '\0');

// All size-n subsets of the type ids [0, type_count), in lexicographic order.
std::vector<PhonemeSubset> all_subsets_of_size(int type_count, int n);
std::vector<PhonemeSubset> all_subsets_of_size(const PhonemeInventory& inventory, int n);

// Asserts the ASL-LEX 2.0 shape: 16 types, Minor Location 37 values,
// Dominant Handshape 49, Path Movement 8. Throws DataError on mismatch.
void validate_asllex_shape(const PhonemeInventory& inventory);

}  // namespace signrec
