#ifndef SPECVM_TEXT_HPP
#define SPECVM_TEXT_HPP

#include <string>

#include "specvm/ir.hpp"

namespace specvm {

struct ParseError {
  std::string message;
  int line = 0;
  int column = 0;

  std::string what() const {
    return message + " at line " + std::to_string(line) + ", column " +
           std::to_string(column);
  }
};

// Parses the parenthesized program format. Throws ParseError on malformed
// input, unknown function names, or CallDirect arity mismatches. Site ids are
// assigned in preorder, so parse(print(p)) reproduces p exactly.
Program parse_program(const std::string& text);

std::string print_program(const Program& p);
std::string print_expr(const Expr& e, const Program& p);

}  // namespace specvm

#endif
