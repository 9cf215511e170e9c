#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chemserve/records.h"

namespace chemserve {

enum class FilterOp {
  kExact,
  kIn,
  kGt,
  kGte,
  kLt,
  kLte,
  kContains,
  kIContains,
  kStartsWith,
  kIsNull,
};

std::string_view to_string(FilterOp op);
// Throws UnknownOperator.
FilterOp parse_filter_op(std::string_view name);

// `value` may be typed JSON or text as it arrives from a URL; it is coerced
// to the field's type when the query runs. For `in`, either a JSON array or
// comma-separated text.
struct FilterClause {
  std::string field_path;
  FilterOp op = FilterOp::kExact;
  Json value;
};

struct SortKey {
  std::string field_path;
  bool descending = false;
};

inline constexpr int kDefaultLimit = 20;
inline constexpr int kMaxLimit = 1000;

struct Query {
  Resource resource = Resource::kMolecule;
  std::vector<FilterClause> filters;
  std::vector<SortKey> order_by;
  int limit = kDefaultLimit;
  int offset = 0;
};

struct PageWindow {
  int limit;
  int offset;

  friend bool operator==(const PageWindow &, const PageWindow &) = default;
};

struct ResultPage {
  std::vector<Json> records;
  std::size_t total_count = 0;
  int limit = kDefaultLimit;
  int offset = 0;
  std::optional<PageWindow> next;
  std::optional<PageWindow> previous;
};

// "field" or "field__op" with a text value.
FilterClause parse_filter_param(std::string_view key, std::string_view value);
// "field" or "-field".
SortKey parse_sort_key(std::string_view text);
std::string format_sort_key(const SortKey &key);

// Validates the query against the resource schema and returns clauses with
// values coerced to field types.
// Throws UnknownField, UnknownOperator, TypeMismatch, InvalidParameter.
std::vector<FilterClause> compile_filters(const Query &query);

// True iff `record` satisfies the compiled clause.
bool clause_matches(const FilterClause &compiled, const Json &record);

// Sort comparator over order_by keys; absent values sort last in either
// direction. Returns <0, 0 or >0.
int compare_records(const std::vector<SortKey> &keys, const Json &a,
                    const Json &b);

ResultPage make_page(std::vector<Json> matches, int limit, int offset);

}  // namespace chemserve
