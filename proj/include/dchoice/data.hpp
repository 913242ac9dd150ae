#pragma once

#include <Eigen/Dense>
#include <string>
#include <string_view>
#include <vector>

#include "dchoice/csv.hpp"
#include "dchoice/model.hpp"
#include "dchoice/rng.hpp"

namespace dchoice {

enum class Directive { continuous, log_continuous, categorical };

struct CovariateRule {
  std::string column;
  Directive directive = Directive::continuous;
  std::string base;                 // categorical only
  std::vector<std::string> levels;  // categorical only; empty = take levels from the data
};

// Encoding rules read from a schema file.
//
// Grammar, one `key = value` per line; `#` starts a comment, blank lines are
// ignored, keys and values are whitespace-trimmed, lists are `|`-separated:
//
//   response  = <column>
//   labels    = <lowest> | ... | <highest>         (J >= 2, distinct)
//   missing   = <token> | <token> ...              (optional)
//   intercept = true | false                       (optional, default true)
//   covariate.<column> = continuous
//   covariate.<column> = log
//   covariate.<column> = categorical:<base>
//   covariate.<column> = categorical:<base>:<level> | <level> ...
//
// Covariates enter the design in the order they are listed.
struct SchemaConfig {
  std::string response;
  std::vector<std::string> labels;
  std::vector<std::string> missing;
  std::vector<CovariateRule> covariates;
  bool intercept = true;

  int categories() const { return static_cast<int>(labels.size()); }
  void validate() const;
};

SchemaConfig parse_schema(std::string_view text);
SchemaConfig read_schema_file(const std::string& path);
std::string format_schema(const SchemaConfig& schema);

enum class ColumnKind { intercept, continuous, log_continuous, indicator };

std::string_view to_string(ColumnKind kind);

// Encoded estimation sample. Responses are category indices 1..J. Immutable
// once built; the constructor checks every invariant.
class Dataset {
 public:
  Dataset(std::vector<int> y, Eigen::MatrixXd x, std::vector<std::string> names,
          std::vector<ColumnKind> kinds, int categories);

  const std::vector<int>& y() const { return y_; }
  const Eigen::MatrixXd& x() const { return x_; }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<ColumnKind>& kinds() const { return kinds_; }
  int categories() const { return categories_; }
  Eigen::Index rows() const { return x_.rows(); }
  Eigen::Index cols() const { return x_.cols(); }
  bool has_intercept() const { return !kinds_.empty() && kinds_[0] == ColumnKind::intercept; }

  // Count of observations per category, index 0 = category 1.
  std::vector<Eigen::Index> category_counts() const;
  // Same responses, design replaced by a single intercept column.
  Dataset intercept_only() const;

  friend bool operator==(const Dataset& a, const Dataset& b);

 private:
  std::vector<int> y_;
  Eigen::MatrixXd x_;
  std::vector<std::string> names_;
  std::vector<ColumnKind> kinds_;
  int categories_;
};

struct EncodingReport {
  std::size_t raw_rows = 0;
  std::size_t dropped_rows = 0;
  std::size_t final_rows = 0;
  std::vector<std::string> warnings;
};

struct EncodedData {
  Dataset data;
  EncodingReport report;
};

// Listwise deletion of rows with a missing token (or an empty cell) in the
// response or any used covariate, natural log of `log` columns, one 0/1
// indicator per non-base level of each categorical column (named
// "column=level"), responses mapped to 1..J in schema order.
EncodedData build_dataset(const RawTable& raw, const SchemaConfig& schema);

// Draws covariates i.i.d. N(0,1) (column 0 is ones when spec.intercept) and
// responses from the latent threshold rule with errors from the link
// distribution. `cutpoints` holds gamma_2..gamma_{J-1}; gamma_1 = 0 is
// implied, so the list must be strictly increasing and start above zero.
Dataset simulate_dataset(const ModelSpec& spec, const Eigen::VectorXd& beta,
                         const Eigen::VectorXd& cutpoints, Eigen::Index n, RandomStream& rng);

// CSV rendering of a dataset (intercept column omitted, responses written as
// category numbers) and a schema that encodes it back unchanged.
RawTable dataset_to_table(const Dataset& data, std::string_view response_name = "y");
SchemaConfig schema_for(const Dataset& data, std::string_view response_name = "y");

}  // namespace dchoice
