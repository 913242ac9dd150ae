#include "dchoice/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "dchoice/errors.hpp"

namespace dchoice {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto bar = s.find('|', start);
    const auto item = trim(s.substr(start, bar == std::string_view::npos ? s.npos : bar - start));
    if (!item.empty()) out.emplace_back(item);
    if (bar == std::string_view::npos) break;
    start = bar + 1;
  }
  return out;
}

std::string join_list(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += " | ";
    out += items[i];
  }
  return out;
}

bool parse_double(std::string_view s, double& value) {
  s = trim(s);
  if (s.starts_with('+')) s.remove_prefix(1);
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, value);
  return ec == std::errc() && ptr == end && std::isfinite(value);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// Schema

void SchemaConfig::validate() const {
  if (response.empty()) throw ParseError("schema: 'response' is required");
  if (labels.size() < 2) throw ParseError("schema: 'labels' needs at least 2 categories");
  std::set<std::string> seen(labels.begin(), labels.end());
  if (seen.size() != labels.size()) throw ParseError("schema: response labels must be distinct");
  std::set<std::string> names;
  for (const auto& rule : covariates) {
    if (!names.insert(rule.column).second) {
      throw ParseError("schema: covariate '" + rule.column + "' listed twice");
    }
    if (rule.column == response) {
      throw ParseError("schema: response column '" + response + "' cannot also be a covariate");
    }
    if (rule.directive == Directive::categorical) {
      if (rule.base.empty()) throw ParseError("schema: categorical '" + rule.column + "' needs a base");
      if (std::find(rule.levels.begin(), rule.levels.end(), rule.base) != rule.levels.end()) {
        throw ParseError("schema: base level of '" + rule.column + "' repeated in its level list");
      }
    }
  }
  if (!intercept && covariates.empty()) {
    throw ParseError("schema: no intercept and no covariates gives an empty design");
  }
}

SchemaConfig parse_schema(std::string_view text) {
  SchemaConfig schema;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("schema line " + std::to_string(line_no) + ": expected 'key = value'", line_no);
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    auto fail = [&](const std::string& why) {
      throw ParseError("schema line " + std::to_string(line_no) + ": " + why, line_no);
    };

    if (key == "response") {
      schema.response = std::string(value);
    } else if (key == "labels") {
      schema.labels = split_list(value);
    } else if (key == "missing") {
      schema.missing = split_list(value);
    } else if (key == "intercept") {
      if (value == "true") {
        schema.intercept = true;
      } else if (value == "false") {
        schema.intercept = false;
      } else {
        fail("intercept must be true or false");
      }
    } else if (key.starts_with("covariate.")) {
      CovariateRule rule;
      rule.column = std::string(trim(key.substr(10)));
      if (rule.column.empty()) fail("covariate name is empty");
      if (value == "continuous") {
        rule.directive = Directive::continuous;
      } else if (value == "log") {
        rule.directive = Directive::log_continuous;
      } else if (value.starts_with("categorical:")) {
        rule.directive = Directive::categorical;
        auto rest = value.substr(12);
        const auto colon = rest.find(':');
        rule.base = std::string(trim(rest.substr(0, colon)));
        if (colon != std::string_view::npos) rule.levels = split_list(rest.substr(colon + 1));
        if (rule.base.empty()) fail("categorical directive needs a base label");
      } else {
        fail("unknown covariate directive '" + std::string(value) + "'");
      }
      schema.covariates.push_back(std::move(rule));
    } else {
      fail("unknown key '" + std::string(key) + "'");
    }
  }
  schema.validate();
  return schema;
}

SchemaConfig read_schema_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open schema file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_schema(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), e.row());
  }
}

std::string format_schema(const SchemaConfig& schema) {
  std::ostringstream out;
  out << "response = " << schema.response << '\n';
  out << "labels = " << join_list(schema.labels) << '\n';
  if (!schema.missing.empty()) out << "missing = " << join_list(schema.missing) << '\n';
  out << "intercept = " << (schema.intercept ? "true" : "false") << '\n';
  for (const auto& rule : schema.covariates) {
    out << "covariate." << rule.column << " = ";
    switch (rule.directive) {
      case Directive::continuous: out << "continuous"; break;
      case Directive::log_continuous: out << "log"; break;
      case Directive::categorical:
        out << "categorical:" << rule.base;
        if (!rule.levels.empty()) out << ':' << join_list(rule.levels);
        break;
    }
    out << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Dataset

std::string_view to_string(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::intercept: return "intercept";
    case ColumnKind::continuous: return "continuous";
    case ColumnKind::log_continuous: return "log";
    case ColumnKind::indicator: return "indicator";
  }
  return "?";
}

Dataset::Dataset(std::vector<int> y, Eigen::MatrixXd x, std::vector<std::string> names,
                 std::vector<ColumnKind> kinds, int categories)
    : y_(std::move(y)),
      x_(std::move(x)),
      names_(std::move(names)),
      kinds_(std::move(kinds)),
      categories_(categories) {
  if (categories_ < 2) throw DomainError("Dataset: need at least 2 categories");
  if (static_cast<Eigen::Index>(y_.size()) != x_.rows()) {
    throw DomainError("Dataset: response length does not match design rows");
  }
  if (static_cast<Eigen::Index>(names_.size()) != x_.cols() ||
      static_cast<Eigen::Index>(kinds_.size()) != x_.cols()) {
    throw DomainError("Dataset: names/kinds do not match design columns");
  }
  for (int v : y_) {
    if (v < 1 || v > categories_) throw DomainError("Dataset: response outside 1..J");
  }
  if (!x_.allFinite()) throw DomainError("Dataset: design matrix has non-finite entries");
  for (Eigen::Index c = 0; c < x_.cols(); ++c) {
    if (kinds_[c] == ColumnKind::intercept) {
      if (c != 0) throw DomainError("Dataset: intercept must be the first column");
      if ((x_.col(0).array() != 1.0).any()) {
        throw DomainError("Dataset: intercept column is not all ones");
      }
    }
  }
}

std::vector<Eigen::Index> Dataset::category_counts() const {
  std::vector<Eigen::Index> counts(categories_, 0);
  for (int v : y_) ++counts[v - 1];
  return counts;
}

Dataset Dataset::intercept_only() const {
  return Dataset(y_, Eigen::MatrixXd::Ones(rows(), 1), {"intercept"}, {ColumnKind::intercept},
                 categories_);
}

bool operator==(const Dataset& a, const Dataset& b) {
  return a.categories_ == b.categories_ && a.y_ == b.y_ && a.names_ == b.names_ &&
         a.kinds_ == b.kinds_ && a.x_.rows() == b.x_.rows() && a.x_.cols() == b.x_.cols() &&
         a.x_ == b.x_;
}

// ---------------------------------------------------------------------------
// Encoding

EncodedData build_dataset(const RawTable& raw, const SchemaConfig& schema) {
  schema.validate();

  auto column_of = [&](const std::string& name) {
    const auto c = raw.find_column(name);
    if (c == RawTable::npos) throw DataError("column '" + name + "' not found in data");
    return c;
  };
  const auto response_col = column_of(schema.response);
  std::vector<std::size_t> cov_cols;
  for (const auto& rule : schema.covariates) cov_cols.push_back(column_of(rule.column));

  auto is_missing = [&](std::string_view cell) {
    cell = trim(cell);
    if (cell.empty()) return true;
    return std::find(schema.missing.begin(), schema.missing.end(), cell) != schema.missing.end();
  };

  EncodingReport report;
  report.raw_rows = raw.row_count();

  // Listwise deletion first, so categorical levels are read from kept rows.
  std::vector<std::size_t> kept;
  for (std::size_t r = 0; r < raw.row_count(); ++r) {
    const auto& row = raw.rows[r];
    bool drop = is_missing(row[response_col]);
    for (auto c : cov_cols) drop = drop || is_missing(row[c]);
    if (drop) {
      ++report.dropped_rows;
    } else {
      kept.push_back(r);
    }
  }
  report.final_rows = kept.size();
  const auto n = static_cast<Eigen::Index>(kept.size());
  // Data records are numbered as in the CSV file: header = 1.
  auto record_no = [](std::size_t r) { return std::to_string(r + 2); };

  std::vector<int> y(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const auto label = trim(raw.rows[kept[i]][response_col]);
    const auto it = std::find(schema.labels.begin(), schema.labels.end(), label);
    if (it == schema.labels.end()) {
      throw DataError("record " + record_no(kept[i]) + ": response '" + std::string(label) +
                      "' is not one of the schema labels");
    }
    y[i] = static_cast<int>(it - schema.labels.begin()) + 1;
  }

  std::vector<Eigen::VectorXd> columns;
  std::vector<std::string> names;
  std::vector<ColumnKind> kinds;
  if (schema.intercept) {
    columns.push_back(Eigen::VectorXd::Ones(n));
    names.emplace_back("intercept");
    kinds.push_back(ColumnKind::intercept);
  }

  for (std::size_t v = 0; v < schema.covariates.size(); ++v) {
    const auto& rule = schema.covariates[v];
    const auto c = cov_cols[v];
    if (rule.directive != Directive::categorical) {
      Eigen::VectorXd col(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto& cell = raw.rows[kept[i]][c];
        double value = 0.0;
        if (!parse_double(cell, value)) {
          throw DataError("record " + record_no(kept[i]) + ", column '" + rule.column +
                          "': '" + cell + "' is not a finite number");
        }
        if (rule.directive == Directive::log_continuous) {
          if (value <= 0.0) {
            throw DataError("record " + record_no(kept[i]) + ", column '" + rule.column +
                            "': cannot take the log of non-positive value " + cell);
          }
          value = std::log(value);
        }
        col[i] = value;
      }
      columns.push_back(std::move(col));
      names.push_back(rule.column);
      kinds.push_back(rule.directive == Directive::log_continuous ? ColumnKind::log_continuous
                                                                  : ColumnKind::continuous);
      continue;
    }

    std::vector<std::string> observed;
    for (Eigen::Index i = 0; i < n; ++i) {
      std::string level(trim(raw.rows[kept[i]][c]));
      if (std::find(observed.begin(), observed.end(), level) == observed.end()) {
        observed.push_back(std::move(level));
      }
    }
    if (n > 0 && std::find(observed.begin(), observed.end(), rule.base) == observed.end()) {
      throw DataError("column '" + rule.column + "': base level '" + rule.base +
                      "' does not occur in the data");
    }
    std::vector<std::string> levels = rule.levels;
    if (levels.empty()) {
      for (const auto& lv : observed) {
        if (lv != rule.base) levels.push_back(lv);
      }
    } else {
      for (const auto& lv : observed) {
        if (lv != rule.base && std::find(levels.begin(), levels.end(), lv) == levels.end()) {
          throw DataError("column '" + rule.column + "': level '" + lv +
                          "' is neither the base nor a declared level");
        }
      }
      for (const auto& lv : levels) {
        if (std::find(observed.begin(), observed.end(), lv) == observed.end()) {
          report.warnings.push_back("column '" + rule.column + "': level '" + lv +
                                    "' does not occur; its indicator is all zeros");
        }
      }
    }
    for (const auto& lv : levels) {
      Eigen::VectorXd col(n);
      for (Eigen::Index i = 0; i < n; ++i) col[i] = trim(raw.rows[kept[i]][c]) == lv ? 1.0 : 0.0;
      columns.push_back(std::move(col));
      names.push_back(rule.column + "=" + lv);
      kinds.push_back(ColumnKind::indicator);
    }
  }

  Eigen::MatrixXd x(n, static_cast<Eigen::Index>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) x.col(static_cast<Eigen::Index>(c)) = columns[c];

  return {Dataset(std::move(y), std::move(x), std::move(names), std::move(kinds),
                  schema.categories()),
          std::move(report)};
}

// ---------------------------------------------------------------------------
// Simulation

Dataset simulate_dataset(const ModelSpec& spec, const Eigen::VectorXd& beta,
                         const Eigen::VectorXd& cutpoints, Eigen::Index n, RandomStream& rng) {
  spec.validate();
  if (beta.size() != spec.covariates) throw DomainError("simulate_dataset: beta length != k");
  if (cutpoints.size() != spec.free_cutpoints()) {
    throw DomainError("simulate_dataset: expected " + std::to_string(spec.free_cutpoints()) +
                      " interior cut-points");
  }
  if (n < 0) throw DomainError("simulate_dataset: negative sample size");
  double prev = 0.0;
  for (Eigen::Index j = 0; j < cutpoints.size(); ++j) {
    if (!std::isfinite(cutpoints[j]) || !(cutpoints[j] > prev)) {
      throw DomainError("simulate_dataset: cut-points must be finite, positive and increasing");
    }
    prev = cutpoints[j];
  }

  const Eigen::Index k = spec.covariates;
  Eigen::VectorXd gamma(spec.categories - 1);  // gamma_1..gamma_{J-1}
  gamma[0] = 0.0;
  gamma.tail(cutpoints.size()) = cutpoints;

  Eigen::MatrixXd x(n, k);
  std::vector<int> y(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index c = 0; c < k; ++c) {
      x(i, c) = (spec.intercept && c == 0) ? 1.0 : rng.normal();
    }
    const double eps = spec.link == Link::probit ? rng.normal() : rng.logistic();
    const double z = x.row(i).dot(beta) + eps;
    // y = j iff gamma_{j-1} < z <= gamma_j
    int j = 1;
    while (j < spec.categories && z > gamma[j - 1]) ++j;
    y[static_cast<std::size_t>(i)] = j;
  }

  std::vector<std::string> names;
  std::vector<ColumnKind> kinds;
  for (Eigen::Index c = 0; c < k; ++c) {
    if (spec.intercept && c == 0) {
      names.emplace_back("intercept");
      kinds.push_back(ColumnKind::intercept);
    } else {
      names.push_back("x" + std::to_string(spec.intercept ? c : c + 1));
      kinds.push_back(ColumnKind::continuous);
    }
  }
  return Dataset(std::move(y), std::move(x), std::move(names), std::move(kinds), spec.categories);
}

RawTable dataset_to_table(const Dataset& data, std::string_view response_name) {
  RawTable table;
  table.columns.emplace_back(response_name);
  for (Eigen::Index c = 0; c < data.cols(); ++c) {
    if (data.kinds()[c] != ColumnKind::intercept) table.columns.push_back(data.names()[c]);
  }
  table.rows.reserve(static_cast<std::size_t>(data.rows()));
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    std::vector<std::string> row;
    row.push_back(std::to_string(data.y()[static_cast<std::size_t>(i)]));
    for (Eigen::Index c = 0; c < data.cols(); ++c) {
      if (data.kinds()[c] != ColumnKind::intercept) row.push_back(format_double(data.x()(i, c)));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

SchemaConfig schema_for(const Dataset& data, std::string_view response_name) {
  SchemaConfig schema;
  schema.response = std::string(response_name);
  for (int j = 1; j <= data.categories(); ++j) schema.labels.push_back(std::to_string(j));
  schema.intercept = data.has_intercept();
  for (Eigen::Index c = 0; c < data.cols(); ++c) {
    if (data.kinds()[c] == ColumnKind::intercept) continue;
    schema.covariates.push_back({data.names()[c], Directive::continuous, {}, {}});
  }
  return schema;
}

}  // namespace dchoice
