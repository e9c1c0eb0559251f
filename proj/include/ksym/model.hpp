#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "ksym/connection.hpp"
#include "ksym/expr.hpp"
#include "ksym/lagrangian.hpp"
#include "ksym/sopde.hpp"

namespace ksym {

/// A parsed model file. Grammar, one statement per line:
///
///   # comment                       (also allowed after a statement)
///   n = <integer>                   (required, before any indexed key)
///   k = <integer>                   (required, before any indexed key)
///   const <name> = <text>           (substituted into later right-hand sides)
///   xi[A][i][B] = <expression>      (SOPDE coefficient; unset entries are 0)
///   N[j][A][i] = <expression>       (connection component; unset entries are 0)
///   lagrangian = <expression>
///
/// A SOPDE/connection exists if at least one of its keys appears.
struct ModelFile {
  Dims dims{1, 1};
  std::optional<Sopde> sopde;
  std::optional<Connection> connection;
  std::optional<Lagrangian> lagrangian;

  /// Accessors that throw ModelError when the section is absent, so the
  /// caller gets a uniform "model lacks X" message.
  const Sopde& need_sopde() const;
  const Connection& need_connection() const;
  const Lagrangian& need_lagrangian() const;
};

/// Parses model text. Throws ModelError with a 1-based line number.
ModelFile parse_model(std::istream& in);
ModelFile parse_model_text(const std::string& text);
ModelFile load_model(const std::string& path);

}  // namespace ksym
