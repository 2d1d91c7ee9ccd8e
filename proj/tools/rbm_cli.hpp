#pragma once

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "rbm/core.hpp"
#include "rbm/diagonal.hpp"
#include "rbm/funalg.hpp"
#include "rbm/martingale.hpp"
#include "rbm/measure.hpp"
#include "rbm/realfun.hpp"
#include "rbm/splitting.hpp"

namespace rbm::cli {

enum ExitCode : int { ok = 0, failure = 1, parse_failure = 2, resource_failure = 3 };

namespace detail {

/// Inline text when it starts with '(', otherwise the contents of a file.
inline std::string text_or_file(const std::string& value, const char* what) {
  if (!value.empty() && value.front() == '(') return value;
  std::ifstream in(value);
  if (!in) throw PreconditionError(std::string("cannot open ") + what + " file " + value);
  std::ostringstream buf;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    buf << line << "\n";
  }
  return buf.str();
}

inline Martingale load_martingale(const std::string& path, const std::optional<std::string>& measure) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open martingale file " + path);
  std::optional<ProbabilityMeasure> nu;
  if (measure) nu = load_measure(*measure);
  return parse_martingale(in, path, nu);
}

inline std::uint32_t table_depth(const Martingale& d, std::optional<std::uint32_t> depth) {
  if (depth) return *depth;
  if (const auto* t = dynamic_cast<const nodes::Table*>(d.node().get())) return t->depth();
  throw PreconditionError("--depth is required");
}

inline std::vector<BitString> strings(const std::vector<std::string>& args) {
  std::vector<BitString> out;
  for (const auto& a : args) out.emplace_back(a);
  return out;
}

inline std::vector<funalg::Oracle> oracles(const std::vector<std::string>& specs) {
  std::vector<funalg::Oracle> out;
  for (const auto& s : specs) out.push_back(funalg::load_oracle(s));
  return out;
}

inline std::string value_line(const Dyadic& v, Precision r) { return v.str_at(r); }

}  // namespace detail

/// Runs one verb. `args` excludes the program name.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Resource-bounded measure kernel and function-algebra interpreter", "rbm"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  // eval
  std::string term_text;
  std::vector<std::string> arg_values, oracle_specs, symbol_specs;
  bool print_term = false, show_meter = false;
  std::optional<std::string> algebra_spec;
  std::optional<std::uint64_t> step_limit;
  auto* eval = app.add_subcommand("eval", "Evaluate a function-algebra term");
  eval->add_option("--term", term_text, "Term s-expression or file")->required();
  eval->add_option("--arg", arg_values, "String argument (repeatable; ~ is the empty string)");
  eval->add_option("--oracle", oracle_specs, "Function argument: builtin name or oracle file");
  eval->add_option("--symbol", symbol_specs, "Extra oracle symbol: builtin name or oracle file");
  eval->add_flag("--print-term", print_term, "Print the normal form and stop");
  eval->add_flag("--meter", show_meter, "Print the evaluation meter");
  eval->add_option("--algebra", algebra_spec, "Require membership: bff, bff_i:<i>, bfsf_i:<i>");
  eval->add_option("--step-limit", step_limit, "Abort after this many steps");

  // check-bound
  std::optional<std::string> bound_file, poly_text, kind_text;
  auto* check = app.add_subcommand("check-bound", "Compare a metered evaluation with a polynomial");
  check->add_option("--bound", bound_file, "Bound file with kind/term/poly lines");
  check->add_option("--term", term_text, "Term s-expression or file");
  check->add_option("--poly", poly_text, "Second-order polynomial");
  check->add_option("--kind", kind_text, "time or space")->check(CLI::IsMember({"time", "space"}));
  check->add_option("--oracle", oracle_specs, "Function argument");
  check->add_option("--arg", arg_values, "String argument");

  // length
  std::string x_value, method = "both";
  auto* length = app.add_subcommand("length", "The length functional 1^{|f|(|x|)}");
  length->add_option("--oracle", oracle_specs, "Oracle: builtin name or file")->required()->expected(1);
  length->add_option("--x", x_value, "Argument string")->required();
  length->add_option("--method", method, "term, brute or both")
      ->check(CLI::IsMember({"term", "brute", "both"}));
  length->add_flag("--meter", show_meter, "Print the meter of the term evaluation");

  // secpoly-eval
  std::vector<std::string> n_values;
  auto* secpoly = app.add_subcommand("secpoly-eval", "Evaluate a second-order polynomial");
  secpoly->add_option("--poly", poly_text, "Polynomial")->required();
  secpoly->add_option("--n", n_values, "Value of n1, n2, ... (repeatable)");
  secpoly->add_option("--oracle", oracle_specs, "Oracle whose length function binds L1, L2, ...");

  // martingale verbs
  std::string file;
  std::optional<std::string> measure_spec;
  std::optional<std::uint32_t> depth;
  std::optional<Precision> precision;
  auto* verify = app.add_subcommand("verify-martingale", "Check the averaging identity of a table");
  verify->add_option("--file", file, "Martingale file")->required();
  verify->add_option("--measure", measure_spec, "Measure (overrides the file header)");
  verify->add_option("--depth", depth, "Depth to check (default: table depth)");

  auto* regularize_cmd = app.add_subcommand("regularize", "Print the regularized martingale");
  regularize_cmd->add_option("--file", file, "Martingale file")->required();
  regularize_cmd->add_option("--measure", measure_spec, "Measure (overrides the file header)");
  regularize_cmd->add_option("--depth", depth, "Depth to print (default: table depth)");
  regularize_cmd->add_option("--precision", precision, "Print approximations at this precision");

  // rh
  std::string alpha_text, s_text, t_text;
  auto* rh = app.add_subcommand("rh", "Robin Hood map rh_alpha(s, t)");
  rh->add_option("--alpha", alpha_text, "alpha in (0,1)")->required();
  rh->add_option("--s", s_text, "First coordinate")->required();
  rh->add_option("--t", t_text, "Second coordinate")->required();

  // splitting verbs
  std::string w_text, v_text, op, set_text;
  Precision r = 8;
  auto* cylinder_cmd = app.add_subcommand("measure-cylinder", "Measure value of a cylinder");
  cylinder_cmd->add_option("--w", w_text, "Cylinder prefix")->required();
  cylinder_cmd->add_option("--measure", measure_spec, "Measure (default uniform)");
  cylinder_cmd->add_option("--precision", r, "Precision r");

  auto* combine = app.add_subcommand("combine", "Measure value of a combination of cylinders");
  combine->add_option("--op", op, "cap, cup or compl")->required()->check(CLI::IsMember({"cap", "cup", "compl"}));
  combine->add_option("--u", w_text, "First cylinder prefix")->required();
  combine->add_option("--v", v_text, "Second cylinder prefix (cap, cup)");
  combine->add_option("--measure", measure_spec, "Measure (default uniform)");
  combine->add_option("--precision", r, "Precision r");

  auto* value_cmd = app.add_subcommand("measure-value", "Measure value of a set expression");
  value_cmd->add_option("--set", set_text, "Set expression or file")->required();
  value_cmd->add_option("--measure", measure_spec, "Measure (default uniform)");
  value_cmd->add_option("--precision", r, "Precision r");

  // diagonalize
  std::optional<Precision> margin;
  std::size_t steps = 8;
  auto* diag = app.add_subcommand("diagonalize", "Run the conservation constructor against a martingale");
  diag->add_option("--file", file, "Martingale file")->required();
  diag->add_option("--measure", measure_spec, "Measure (overrides the file header)");
  diag->add_option("--w", w_text, "Starting prefix")->required();
  diag->add_option("--m", margin, "Escape margin (default: least admissible)");
  diag->add_option("--depth", steps, "Number of constructor bits");

  // enumerate
  std::size_t count = 8;
  std::string from_text = "0";
  auto* enumerate = app.add_subcommand("enumerate", "Strings in the standard enumeration");
  enumerate->add_option("--count", count, "How many strings");
  enumerate->add_option("--from", from_text, "Index of the first string");

  const std::string verb = args.empty() ? std::string() : args.front();
  auto fail = [&](int code, const std::string& message) {
    err << "rbm" << (verb.empty() || verb[0] == '-' ? "" : " " + verb) << ": " << message << "\n";
    return code;
  };

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return ok;
  } catch (const CLI::ParseError& e) {
    return fail(parse_failure, e.what());
  }

  try {
    if (*eval) {
      const funalg::Term t = funalg::parse_term(detail::text_or_file(term_text, "term"));
      if (algebra_spec) {
        const auto algebra = funalg::Algebra::parse(*algebra_spec, symbol_specs.size());
        if (auto why = algebra.reject(t)) return fail(failure, "term rejected: " + *why);
      }
      if (print_term) {
        out << t.str() << "\n";
        return ok;
      }
      funalg::Meter meter;
      meter.step_limit = step_limit;
      const BitString value = funalg::evaluate(t, detail::oracles(oracle_specs),
                                               detail::strings(arg_values), &meter,
                                               detail::oracles(symbol_specs));
      out << value << "\n";
      if (show_meter) out << meter.str() << "\n";
      return ok;
    }
    if (*check) {
      std::optional<funalg::BoundSpec> spec;
      if (bound_file) {
        spec = funalg::load_bound_spec(*bound_file);
      } else if (!term_text.empty() && poly_text) {
        spec = funalg::BoundSpec{funalg::BoundKind::time,
                                 funalg::parse_term(detail::text_or_file(term_text, "term")),
                                 funalg::parse_secpoly(*poly_text)};
      } else {
        return fail(failure, "either --bound or both --term and --poly are required");
      }
      if (kind_text) spec->kind = funalg::parse_bound_kind(*kind_text);
      const auto report = funalg::check_bound(spec->term, spec->poly, detail::oracles(oracle_specs),
                                              detail::strings(arg_values), spec->kind);
      out << report.str() << "\n";
      return report.within() ? ok : failure;
    }
    if (*length) {
      const funalg::Oracle f = funalg::load_oracle(oracle_specs.front());
      const BitString x(x_value);
      std::optional<BitString> by_term, brute;
      funalg::Meter meter;
      if (method != "brute") by_term = funalg::length_by_term(f, x, &meter);
      if (method != "term") brute = funalg::length_brute_force(f, x);
      if (by_term && brute && *by_term != *brute) {
        return fail(failure, "term gives " + by_term->str() + " but brute force gives " + brute->str());
      }
      out << (by_term ? *by_term : *brute) << "\n";
      if (show_meter && by_term) out << meter.str() << "\n";
      return ok;
    }
    if (*secpoly) {
      const funalg::SecPoly p = funalg::parse_secpoly(*poly_text);
      std::vector<Integer> nvals;
      for (const auto& n : n_values) {
        const Integer v = rbm::detail::parse_integer(n);
        if (v < 0) throw DomainError("--n values are natural numbers, got " + n);
        nvals.push_back(v);
      }
      std::vector<funalg::SecPoly::LengthFn> lengths;
      for (const auto& f : detail::oracles(oracle_specs)) {
        lengths.push_back([f](const Integer& n) { return f.length(n); });
      }
      out << p.eval(lengths, nvals) << "\n";
      return ok;
    }
    if (*verify) {
      const Martingale d = detail::load_martingale(file, measure_spec);
      const std::uint32_t n = detail::table_depth(d, depth);
      if (auto bad = verify_martingale(d, n)) {
        out << "violation " << bad->node << "\n";
        return fail(failure, file + ": node " + bad->node.str() + ": " + bad->message);
      }
      out << "ok depth=" << n << "\n";
      return ok;
    }
    if (*regularize_cmd) {
      const Martingale d = detail::load_martingale(file, measure_spec);
      const std::uint32_t n = detail::table_depth(d, depth);
      const Martingale reg = regularize(d);
      const Integer total = pow2(n + 1) - 1;
      for (Integer i = 0; i < total; ++i) {
        const BitString w = ntob(i);
        out << w << " ";
        if (precision) out << reg.approx(*precision, w).str_at(*precision);
        else out << format_rational(reg.value(w));
        out << "\n";
      }
      out << "regular " << (is_regular(reg, n) ? "yes" : "no") << "\n";
      return ok;
    }
    if (*rh) {
      const auto [a, b] = robin_hood(parse_rational(alpha_text), parse_rational(s_text),
                                     parse_rational(t_text));
      out << format_rational(a) << " " << format_rational(b) << "\n";
      return ok;
    }
    const ProbabilityMeasure nu = load_measure(measure_spec.value_or("uniform"));
    if (*cylinder_cmd) {
      out << detail::value_line(measure_value(cylinder(BitString(w_text), nu), r), r) << "\n";
      return ok;
    }
    if (*combine) {
      const SplittingOperator u = cylinder(BitString(w_text), nu);
      if (op == "compl") {
        out << detail::value_line(measure_value(complement(u), r), r) << "\n";
        return ok;
      }
      if (v_text.empty()) return fail(failure, "--v is required for " + op);
      const SplittingOperator v = cylinder(BitString(v_text), nu);
      const SplittingOperator c = op == "cap" ? intersect(u, v) : unite(u, v);
      out << detail::value_line(measure_value(c, r), r) << "\n";
      return ok;
    }
    if (*value_cmd) {
      const SplittingOperator phi = parse_set_expression(detail::text_or_file(set_text, "set"), nu);
      out << detail::value_line(measure_value(phi, r), r) << "\n";
      return ok;
    }
    if (*diag) {
      const Martingale d = detail::load_martingale(file, measure_spec);
      const BitString w(w_text);
      const Precision m = margin ? *margin : least_escape_margin(d, w);
      const ConservationReport report = conservation_check(d, w, m, steps);
      out << "m " << m << "\n" << report.str();
      out << "prefix " << report.prefix << "\n";
      out << "max " << format_rational(report.max_capital) << "\n";
      out << "escaped " << (report.escaped ? "yes" : "no") << "\n";
      return report.escaped ? ok : failure;
    }
    if (*enumerate) {
      const Integer from = rbm::detail::parse_integer(from_text);
      if (from < 0) throw DomainError("--from must be a natural number, got " + from_text);
      check_magnitude(count, "enumerate count");
      for (std::size_t i = 0; i < count; ++i) {
        const Integer k = from + i;
        out << k << " " << ntob(k) << "\n";
      }
      return ok;
    }
    return fail(parse_failure, "no verb");
  } catch (const ParseError& e) {
    return fail(parse_failure, e.what());
  } catch (const ResourceError& e) {
    return fail(resource_failure, e.what());
  } catch (const Error& e) {
    return fail(failure, e.what());
  } catch (const std::exception& e) {
    return fail(failure, e.what());
  }
}

}  // namespace rbm::cli
