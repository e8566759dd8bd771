#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "signrec/inventory.hpp"

namespace signrec {

struct Sign {
  std::string gloss;           // original spelling, surrounding whitespace trimmed
  int gloss_id = 0;            // row index in the lexicon file
  std::vector<int> phonemes;   // one value id per inventory type, kMissing allowed
};

// The sign vocabulary with one phoneme tuple per gloss.
class Lexicon {
 public:
  Lexicon() = default;
  Lexicon(PhonemeInventory inventory, std::vector<Sign> signs);

  const PhonemeInventory& inventory() const { return inventory_; }
  const std::vector<Sign>& signs() const { return signs_; }
  int size() const { return static_cast<int>(signs_.size()); }
  const Sign& sign(int gloss_id) const { return signs_.at(gloss_id); }
  // Case-insensitive, whitespace-trimmed lookup. Returns -1 when absent.
  int find_gloss(const std::string& gloss) const;

 private:
  PhonemeInventory inventory_;
  std::vector<Sign> signs_;
  std::unordered_map<std::string, int> gloss_index_;  // normalized gloss -> id
};

// Normalization used for gloss matching: trim + lowercase.
std::string normalize_gloss(const std::string& gloss);

// Loads a lexicon file (header `gloss,<type1>,...,<typeK>`), inducing the
// inventory. Row order is preserved; gloss ids are 0..|V|-1 in row order.
Lexicon load_lexicon(const std::string& path, char delimiter = '\0');

// Writes the lexicon back in the same format (value names, "-1" for missing).
void save_lexicon(const Lexicon& lexicon, const std::string& path, char delimiter = ',');

// Projects a sign's tuple onto the subset, in ascending type-id order.
// Throws DataError if any subset member is missing for this sign.
std::vector<int> restrict_tuple(const Sign& sign, const PhonemeSubset& subset);

// True iff the sign has a value for every member of the subset.
bool has_all_values(const Sign& sign, const PhonemeSubset& subset);

}  // namespace signrec
