#pragma once

#include <map>
#include <string>
#include <vector>

#include "signrec/lexicon.hpp"

namespace signrec {

// Posterior over signs given the observed values on a fixed subset,
// implemented as buckets of gloss ids keyed by restricted tuple.
class LookupTable {
 public:
  LookupTable(const Lexicon& lexicon, PhonemeSubset subset);

  const PhonemeSubset& subset() const { return subset_; }
  // Signs that had a missing value on some subset member.
  int excluded_count() const { return excluded_; }
  int included_count() const { return included_; }
  int unique_count() const;  // buckets of size 1

  const std::map<std::vector<int>, std::vector<int>>& buckets() const {
    return buckets_;
  }

  struct Posterior {
    std::vector<std::pair<int, double>> probabilities;  // (gloss_id, p), uniform
    bool unseen = false;                                // tuple not in the table
  };
  // Throws DataError when the tuple arity does not match the subset size.
  Posterior query(const std::vector<int>& observed) const;

 private:
  PhonemeSubset subset_;
  std::map<std::vector<int>, std::vector<int>> buckets_;
  int excluded_ = 0;
  int included_ = 0;
};

LookupTable build_lookup(const Lexicon& lexicon, const PhonemeSubset& subset);

enum class UtilityKind { Singleton, Pairwise };
enum class SelectMethod { Exact, Greedy };

struct UtilityResult {
  PhonemeSubset subset;
  double utility = 0.0;
  int unique_count = 0;
  int included_count = 0;
  int excluded_count = 0;
  SelectMethod method = SelectMethod::Exact;

  std::vector<std::string> type_names(const PhonemeInventory& inventory) const;
};

// Fraction of included signs whose restricted tuple is unique in the lexicon.
// Signs with a missing value on the subset are excluded from both numerator
// and denominator. utility is 0 when nothing is included.
UtilityResult compute_utility(const Lexicon& lexicon, const PhonemeSubset& subset,
                              UtilityKind kind = UtilityKind::Singleton);

// argmax over size-n subsets. Exact enumerates all C(K, n) subsets; greedy
// grows one type at a time by best marginal utility. Ties break toward the
// lexicographically smallest subset.
UtilityResult select_optimal_subset(const Lexicon& lexicon, int n,
                                    SelectMethod method = SelectMethod::Exact);

std::vector<UtilityResult> utility_sweep(const Lexicon& lexicon,
                                         const std::vector<int>& sizes,
                                         SelectMethod method = SelectMethod::Exact);

}  // namespace signrec
