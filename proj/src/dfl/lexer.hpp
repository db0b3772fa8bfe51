#pragma once

#include "hedcheck/bigint.hpp"

#include <string>
#include <vector>

namespace hedcheck::dfl {

struct Token {
    enum Kind { Ident, Number, Punct, End } kind;
    std::string text;
    BigInt value;
    int line;
    int column;
};

std::vector<Token> tokenize(const std::string& text);

} // namespace hedcheck::dfl
