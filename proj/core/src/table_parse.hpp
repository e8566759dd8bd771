#pragma once

// Internal delimiter-separated table reader shared by inventory and lexicon
// loading. Not installed.

#include <string>
#include <vector>

#include "signrec/inventory.hpp"

namespace signrec::detail {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  char delimiter = ',';
};

std::string trim(const std::string& s);

// delimiter '\0' auto-detects: tab if the header line contains one, else comma.
Table parse_table_file(const std::string& path, char delimiter);

struct InventoryScan {
  PhonemeInventory inventory;
  int gloss_column = -1;
  std::vector<int> type_columns;  // file column index per type id
};

InventoryScan scan_inventory(const Table& table);

}  // namespace signrec::detail
