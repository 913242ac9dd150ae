#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dchoice {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitNotConverged = 2;

// Entry point for the `dchoice` tool. `args` excludes the program name.
//
//   dchoice fit      --data d.csv --schema s.schema --out stem [--family F] [--link L]
//                    [--max-iter N] [--tol T] [--verbose]
//   dchoice effects  (fit flags) [--covariate NAME]... [--scale NAME=MULT]... [--pfilter P]
//   dchoice simulate --out stem --beta b0,b1,... [--cutpoints g2,...] [--n N] [--seed S]
//                    [--family F] [--link L] [--no-intercept]
//   dchoice bayes    --data d.csv --schema s.schema --out stem [--family F] [--seed S]
//                    [--draws S] [--burn B] [--mh-step H]
//
// fit and effects write stem.txt and stem.json; simulate writes stem.csv and
// stem.schema; bayes writes stem.txt, stem.json and stem_chain.csv.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dchoice
