#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "spinwave/symbolic/rewrite.hpp"

namespace spinwave::symbolic {

/// Identity corpus format, one statement per line, `#` to end of line is a
/// comment:
///
///   LHS == RHS                            claim checked by canonicalization
///   claim NAME [using R1, R2 | *]: LHS == RHS
///   refute NAME [using ...]: LHS == RHS   negative control: must not verify
///   rule NAME: PATTERN -> REPLACEMENT
///   kernel TEMPLATE [symmetric | antisymmetric] [operator]
///                   [weight W] [antiweight W]
///   convention standard | penrose         applies to the claims that follow
///
/// `using *` selects every rule declared above the claim.
struct ClaimDecl {
  std::string name;
  std::size_t line = 0;
  std::string text;  // the written `LHS == RHS`
  Expr lhs;
  Expr rhs;
  std::vector<RewriteRule> rules;
  bool refute = false;
  std::string convention = "standard";
};

struct IdentityFile {
  std::vector<RewriteRule> rules;
  std::vector<ClaimDecl> claims;
};

/// Throws ParseError with the message prefixed by `line L:`; the position is
/// the byte offset into `text`.  Rule declarations are checked here, so an
/// invalid rule is a parse-time error.
IdentityFile parse_identity_file(std::string_view text);

/// Reads and parses a file; a missing file is a config error.
IdentityFile load_identity_file(const std::filesystem::path& path);

const MetricSpinorConvention& convention_named(const std::string& name);

struct ClaimResult {
  const ClaimDecl* claim = nullptr;
  VerifyReport report;
  bool passed = false;  // verified, or failed to verify for a refute
};

ClaimResult run_claim(const ClaimDecl& claim);

}  // namespace spinwave::symbolic
