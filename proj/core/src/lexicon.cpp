#include "signrec/lexicon.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "signrec/errors.hpp"
#include "table_parse.hpp"

namespace signrec {

std::string normalize_gloss(const std::string& gloss) {
  std::string out = detail::trim(gloss);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

Lexicon::Lexicon(PhonemeInventory inventory, std::vector<Sign> signs)
    : inventory_(std::move(inventory)), signs_(std::move(signs)) {
  for (std::size_t i = 0; i < signs_.size(); ++i) {
    Sign& s = signs_[i];
    if (s.gloss.empty()) throw DataError("empty gloss at row " + std::to_string(i));
    s.gloss_id = static_cast<int>(i);
    if (static_cast<int>(s.phonemes.size()) != inventory_.type_count())
      throw DataError("sign '" + s.gloss + "' has " +
                      std::to_string(s.phonemes.size()) + " phoneme values, expected " +
                      std::to_string(inventory_.type_count()));
    for (int t = 0; t < inventory_.type_count(); ++t) {
      int v = s.phonemes[t];
      if (v != kMissing && (v < 0 || v >= inventory_.type(t).cardinality()))
        throw DataError("value id out of range for sign '" + s.gloss + "'");
    }
    if (!gloss_index_.emplace(normalize_gloss(s.gloss), s.gloss_id).second)
      throw DataError("duplicate gloss: " + s.gloss);
  }
}

int Lexicon::find_gloss(const std::string& gloss) const {
  auto it = gloss_index_.find(normalize_gloss(gloss));
  return it == gloss_index_.end() ? -1 : it->second;
}

Lexicon load_lexicon(const std::string& path, char delimiter) {
  detail::Table table = detail::parse_table_file(path, delimiter);
  detail::InventoryScan scan = detail::scan_inventory(table);

  std::vector<Sign> signs;
  signs.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    Sign sign;
    sign.gloss = row[scan.gloss_column];
    sign.phonemes.reserve(scan.type_columns.size());
    for (std::size_t t = 0; t < scan.type_columns.size(); ++t) {
      const std::string& cell = row[scan.type_columns[t]];
      if (cell == "-1" || cell.empty()) {
        sign.phonemes.push_back(kMissing);
      } else {
        int v = scan.inventory.type(static_cast<int>(t)).value_id(cell);
        if (v == kMissing)
          throw DataError("unknown value '" + cell + "' for type " +
                          scan.inventory.type(static_cast<int>(t)).name);
        sign.phonemes.push_back(v);
      }
    }
    signs.push_back(std::move(sign));
  }
  return Lexicon(std::move(scan.inventory), std::move(signs));
}

void save_lexicon(const Lexicon& lexicon, const std::string& path, char delimiter) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write file: " + path);
  out << "gloss";
  for (const PhonemeType& t : lexicon.inventory().types()) out << delimiter << t.name;
  out << "\n";
  for (const Sign& s : lexicon.signs()) {
    out << s.gloss;
    for (int t = 0; t < lexicon.inventory().type_count(); ++t) {
      int v = s.phonemes[t];
      out << delimiter;
      if (v == kMissing)
        out << "-1";
      else
        out << lexicon.inventory().type(t).value_names[v];
    }
    out << "\n";
  }
}

bool has_all_values(const Sign& sign, const PhonemeSubset& subset) {
  for (int t : subset)
    if (sign.phonemes.at(t) == kMissing) return false;
  return true;
}

std::vector<int> restrict_tuple(const Sign& sign, const PhonemeSubset& subset) {
  std::vector<int> out;
  out.reserve(subset.size());
  for (int t : subset) {
    int v = sign.phonemes.at(t);
    if (v == kMissing)
      throw DataError("sign '" + sign.gloss + "' has no value for type " +
                      std::to_string(t));
    out.push_back(v);
  }
  return out;
}

}  // namespace signrec
