#include "signrec/utility.hpp"

#include "signrec/errors.hpp"

namespace signrec {

LookupTable::LookupTable(const Lexicon& lexicon, PhonemeSubset subset)
    : subset_(std::move(subset)) {
  for (const Sign& sign : lexicon.signs()) {
    if (!has_all_values(sign, subset_)) {
      ++excluded_;
      continue;
    }
    buckets_[restrict_tuple(sign, subset_)].push_back(sign.gloss_id);
    ++included_;
  }
}

int LookupTable::unique_count() const {
  int unique = 0;
  for (const auto& [tuple, glosses] : buckets_)
    if (glosses.size() == 1) ++unique;
  return unique;
}

LookupTable::Posterior LookupTable::query(const std::vector<int>& observed) const {
  if (static_cast<int>(observed.size()) != subset_.size())
    throw DataError("observed tuple arity " + std::to_string(observed.size()) +
                    " does not match subset size " + std::to_string(subset_.size()));
  Posterior posterior;
  auto it = buckets_.find(observed);
  if (it == buckets_.end()) {
    posterior.unseen = true;
    return posterior;
  }
  const double p = 1.0 / static_cast<double>(it->second.size());
  for (int gloss_id : it->second) posterior.probabilities.emplace_back(gloss_id, p);
  return posterior;
}

LookupTable build_lookup(const Lexicon& lexicon, const PhonemeSubset& subset) {
  return LookupTable(lexicon, subset);
}

std::vector<std::string> UtilityResult::type_names(
    const PhonemeInventory& inventory) const {
  std::vector<std::string> names;
  for (int t : subset) names.push_back(inventory.type(t).name);
  return names;
}

UtilityResult compute_utility(const Lexicon& lexicon, const PhonemeSubset& subset,
                              UtilityKind kind) {
  if (lexicon.size() < 2) throw DataError("utility needs at least 2 signs");
  LookupTable table(lexicon, subset);

  UtilityResult result;
  result.subset = subset;
  result.unique_count = table.unique_count();
  result.included_count = table.included_count();
  result.excluded_count = table.excluded_count();

  if (kind == UtilityKind::Singleton) {
    result.utility = table.included_count() > 0
                         ? static_cast<double>(result.unique_count) /
                               static_cast<double>(result.included_count)
                         : 0.0;
    return result;
  }

  // Pairwise variant: for each included sign S, observing S's own tuple,
  // count signs S' with p(S|obs) > p(S'|obs). That is every included sign
  // outside S's bucket. Kept for inspection only; not used in selection.
  long long pair_wins = 0;
  for (const auto& [tuple, glosses] : table.buckets())
    pair_wins += static_cast<long long>(glosses.size()) *
                 (table.included_count() - static_cast<long long>(glosses.size()));
  result.utility = lexicon.size() > 1
                       ? static_cast<double>(pair_wins) /
                             static_cast<double>(lexicon.size() - 1)
                       : 0.0;
  return result;
}

UtilityResult select_optimal_subset(const Lexicon& lexicon, int n,
                                    SelectMethod method) {
  const int type_count = lexicon.inventory().type_count();
  if (n < 0 || n > type_count)
    throw DataError("subset size " + std::to_string(n) + " out of range [0, " +
                    std::to_string(type_count) + "]");

  if (method == SelectMethod::Exact) {
    UtilityResult best;
    bool first = true;
    // enumeration is lexicographic, so strict improvement keeps the
    // lexicographically smallest subset on ties
    for (const PhonemeSubset& subset : all_subsets_of_size(type_count, n)) {
      UtilityResult r = compute_utility(lexicon, subset);
      if (first || r.utility > best.utility) {
        best = r;
        first = false;
      }
    }
    best.method = SelectMethod::Exact;
    return best;
  }

  PhonemeSubset current;
  UtilityResult result = compute_utility(lexicon, current);
  for (int step = 0; step < n; ++step) {
    bool have_candidate = false;
    UtilityResult best_candidate;
    for (int t = 0; t < type_count; ++t) {
      if (current.contains(t)) continue;
      UtilityResult r = compute_utility(lexicon, current.with(t));
      if (!have_candidate || r.utility > best_candidate.utility) {
        best_candidate = r;
        have_candidate = true;
      }
    }
    current = best_candidate.subset;
    result = best_candidate;
  }
  result.method = SelectMethod::Greedy;
  return result;
}

std::vector<UtilityResult> utility_sweep(const Lexicon& lexicon,
                                         const std::vector<int>& sizes,
                                         SelectMethod method) {
  std::vector<UtilityResult> results;
  results.reserve(sizes.size());
  for (int n : sizes) results.push_back(select_optimal_subset(lexicon, n, method));
  return results;
}

}  // namespace signrec
