#pragma once

#include "isac/prob.hpp"

#include <string>
#include <string_view>

namespace isac {

// I(A;B|C) or H(A|B). Lists are comma or space separated; adjacent names may also be
// written without separators (X1X2) when every piece is a known variable.
struct InfoExpr {
    enum class Kind { Entropy, Mutual };
    Kind kind = Kind::Entropy;
    VarList a;
    VarList b;  // empty for entropy
    VarList given;

    VarList variables() const;
    std::string str() const;
};

// ParseError positions are reported as line 1, 1-based column.
InfoExpr parse_info_expr(std::string_view text, const VarList& known);

double evaluate(const InfoExpr& e, const JointDist& joint);

}  // namespace isac
