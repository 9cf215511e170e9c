#include "chemserve/query.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>

#include "chemserve/error.h"

namespace chemserve {
namespace {

constexpr std::array<std::pair<FilterOp, std::string_view>, 10> kOpNames {{
    {FilterOp::kExact, "exact"},
    {FilterOp::kIn, "in"},
    {FilterOp::kGt, "gt"},
    {FilterOp::kGte, "gte"},
    {FilterOp::kLt, "lt"},
    {FilterOp::kLte, "lte"},
    {FilterOp::kContains, "contains"},
    {FilterOp::kIContains, "icontains"},
    {FilterOp::kStartsWith, "startswith"},
    {FilterOp::kIsNull, "isnull"},
}};

std::string lower(std::string_view text) {
  std::string out(text);
  for (char &c : out) {
    if (c >= 'A' && c <= 'Z') {
      c = static_cast<char>(c - 'A' + 'a');
    }
  }
  return out;
}

std::string describe(const FilterClause &clause) {
  return clause.field_path + "__" + std::string(to_string(clause.op)) + "=" +
         (clause.value.is_string() ? clause.value.get<std::string>()
                                   : clause.value.dump());
}

Json coerce_scalar(const FilterClause &clause, FieldType type,
                   const Json &value) {
  const auto fail = [&](const char *why) -> Json {
    throw TypeMismatch(describe(clause) + ": " + why);
  };
  switch (type) {
  case FieldType::kText:
    if (!value.is_string()) {
      return fail("expected text");
    }
    return value;
  case FieldType::kInteger: {
    if (value.is_number_integer()) {
      return value.get<long long>();
    }
    if (value.is_number_float()) {
      const double d = value.get<double>();
      if (std::floor(d) != d) {
        return fail("expected integer");
      }
      return static_cast<long long>(d);
    }
    if (value.is_string()) {
      const auto &s = value.get_ref<const std::string &>();
      long long v = 0;
      const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec == std::errc() && end == s.data() + s.size() && !s.empty()) {
        return v;
      }
    }
    return fail("expected integer");
  }
  case FieldType::kReal: {
    if (value.is_number()) {
      return value.get<double>();
    }
    if (value.is_string()) {
      const auto &s = value.get_ref<const std::string &>();
      double v = 0;
      const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec == std::errc() && end == s.data() + s.size() && !s.empty() &&
          std::isfinite(v)) {
        return v;
      }
    }
    return fail("expected number");
  }
  }
  return fail("unsupported type");
}

bool coerce_bool(const FilterClause &clause) {
  const Json &v = clause.value;
  if (v.is_boolean()) {
    return v.get<bool>();
  }
  if (v.is_string()) {
    const std::string s = lower(v.get<std::string>());
    if (s == "true" || s == "1") {
      return true;
    }
    if (s == "false" || s == "0") {
      return false;
    }
  }
  if (v.is_number_integer() && (v == 0 || v == 1)) {
    return v == 1;
  }
  throw TypeMismatch(describe(clause) + ": isnull expects true or false");
}

// Three-way comparison of two present, same-typed values.
int compare_values(const Json &a, const Json &b) {
  if (a.is_string() && b.is_string()) {
    const int c = a.get_ref<const std::string &>().compare(
        b.get_ref<const std::string &>());
    return (c > 0) - (c < 0);
  }
  if (a.is_number_integer() && b.is_number_integer()) {
    const auto x = a.get<long long>();
    const auto y = b.get<long long>();
    return (x > y) - (x < y);
  }
  if (a.is_number() && b.is_number()) {
    const auto x = a.get<double>();
    const auto y = b.get<double>();
    return (x > y) - (x < y);
  }
  // Mixed kinds cannot arise from schema-conforming records; order by kind.
  return (a.type() > b.type()) - (a.type() < b.type());
}

}  // namespace

std::string_view to_string(FilterOp op) {
  for (const auto &[o, name] : kOpNames) {
    if (o == op) {
      return name;
    }
  }
  return "?";
}

FilterOp parse_filter_op(std::string_view name) {
  for (const auto &[o, n] : kOpNames) {
    if (n == name) {
      return o;
    }
  }
  throw UnknownOperator(std::string(name));
}

FilterClause parse_filter_param(std::string_view key, std::string_view value) {
  FilterClause clause;
  const auto sep = key.find("__");
  if (sep == std::string_view::npos) {
    clause.field_path = std::string(key);
  } else {
    clause.field_path = std::string(key.substr(0, sep));
    clause.op = parse_filter_op(key.substr(sep + 2));
  }
  clause.value = std::string(value);
  return clause;
}

SortKey parse_sort_key(std::string_view text) {
  SortKey key;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    key.descending = text.front() == '-';
    text.remove_prefix(1);
  }
  key.field_path = std::string(text);
  return key;
}

std::string format_sort_key(const SortKey &key) {
  return (key.descending ? "-" : "") + key.field_path;
}

std::vector<FilterClause> compile_filters(const Query &query) {
  const ResourceSchema &s = schema(query.resource);
  if (query.limit < 1 || query.limit > kMaxLimit) {
    throw InvalidParameter("limit must be between 1 and " +
                           std::to_string(kMaxLimit));
  }
  if (query.offset < 0) {
    throw InvalidParameter("offset must be non-negative");
  }
  for (const SortKey &key : query.order_by) {
    if (s.field(key.field_path) == nullptr) {
      throw UnknownField(key.field_path);
    }
  }
  std::vector<FilterClause> out;
  out.reserve(query.filters.size());
  for (const FilterClause &clause : query.filters) {
    const FieldSpec *field = s.field(clause.field_path);
    if (field == nullptr) {
      throw UnknownField(clause.field_path);
    }
    FilterClause compiled {clause.field_path, clause.op, nullptr};
    switch (clause.op) {
    case FilterOp::kIsNull:
      compiled.value = coerce_bool(clause);
      break;
    case FilterOp::kIn: {
      Json items = Json::array();
      if (clause.value.is_array()) {
        items = clause.value;
      } else if (clause.value.is_string()) {
        const std::string &text = clause.value.get_ref<const std::string &>();
        std::size_t start = 0;
        while (true) {
          const auto comma = text.find(',', start);
          items.push_back(text.substr(start, comma - start));
          if (comma == std::string::npos) {
            break;
          }
          start = comma + 1;
        }
      } else {
        items.push_back(clause.value);
      }
      compiled.value = Json::array();
      for (const Json &item : items) {
        compiled.value.push_back(coerce_scalar(clause, field->type, item));
      }
      break;
    }
    case FilterOp::kContains:
    case FilterOp::kIContains:
    case FilterOp::kStartsWith:
      if (field->type != FieldType::kText) {
        throw TypeMismatch(describe(clause) + ": text operator on " +
                           "numeric field");
      }
      compiled.value = coerce_scalar(clause, field->type, clause.value);
      if (clause.op == FilterOp::kIContains) {
        compiled.value = lower(compiled.value.get<std::string>());
      }
      break;
    default:
      compiled.value = coerce_scalar(clause, field->type, clause.value);
      break;
    }
    out.push_back(std::move(compiled));
  }
  return out;
}

bool clause_matches(const FilterClause &c, const Json &record) {
  const Json *v = lookup(record, c.field_path);
  if (c.op == FilterOp::kIsNull) {
    return (v == nullptr) == c.value.get<bool>();
  }
  if (v == nullptr) {
    return false;
  }
  switch (c.op) {
  case FilterOp::kExact:
    return compare_values(*v, c.value) == 0;
  case FilterOp::kIn:
    return std::any_of(c.value.begin(), c.value.end(), [&](const Json &x) {
      return compare_values(*v, x) == 0;
    });
  case FilterOp::kGt:
    return compare_values(*v, c.value) > 0;
  case FilterOp::kGte:
    return compare_values(*v, c.value) >= 0;
  case FilterOp::kLt:
    return compare_values(*v, c.value) < 0;
  case FilterOp::kLte:
    return compare_values(*v, c.value) <= 0;
  case FilterOp::kContains:
    return v->get_ref<const std::string &>().find(
               c.value.get_ref<const std::string &>()) != std::string::npos;
  case FilterOp::kIContains:
    return lower(v->get_ref<const std::string &>())
               .find(c.value.get_ref<const std::string &>()) !=
           std::string::npos;
  case FilterOp::kStartsWith:
    return v->get_ref<const std::string &>().starts_with(
        c.value.get_ref<const std::string &>());
  case FilterOp::kIsNull:
    break;
  }
  return false;
}

int compare_records(const std::vector<SortKey> &keys, const Json &a,
                    const Json &b) {
  for (const SortKey &key : keys) {
    const Json *x = lookup(a, key.field_path);
    const Json *y = lookup(b, key.field_path);
    if (x == nullptr || y == nullptr) {
      if (x != y) {
        return x == nullptr ? 1 : -1;
      }
      continue;
    }
    const int c = compare_values(*x, *y);
    if (c != 0) {
      return key.descending ? -c : c;
    }
  }
  return 0;
}

ResultPage make_page(std::vector<Json> matches, int limit, int offset) {
  ResultPage page;
  page.total_count = matches.size();
  page.limit = limit;
  page.offset = offset;
  const std::size_t begin =
      std::min(matches.size(), static_cast<std::size_t>(offset));
  const std::size_t end =
      std::min(matches.size(), begin + static_cast<std::size_t>(limit));
  page.records.assign(std::make_move_iterator(matches.begin() + begin),
                      std::make_move_iterator(matches.begin() + end));
  if (static_cast<std::size_t>(offset) + limit < page.total_count) {
    page.next = PageWindow {limit, offset + limit};
  }
  if (offset > 0) {
    page.previous = PageWindow {limit, std::max(0, offset - limit)};
  }
  return page;
}

}  // namespace chemserve
