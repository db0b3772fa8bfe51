#include "lexer.hpp"

#include "hedcheck/error.hpp"

#include <array>
#include <cctype>
#include <string_view>

namespace hedcheck::dfl {

namespace {

constexpr std::array<std::string_view, 7> kTwoChar = {":=", "<<", ">>", "==", "!=", "<=", ">="};
constexpr std::string_view kOneChar = "+-*/%&|^~<>()[]{};:,?=!";

int digit_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return 99;
}

} // namespace

std::vector<Token> tokenize(const std::string& text) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
            while (i < text.size() && text[i] != '\n') advance(1);
            continue;
        }
        const int tl = line, tc = col;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
            out.push_back({Token::Ident, text.substr(i, j - i), 0, tl, tc});
            advance(j - i);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            unsigned base = 10;
            std::size_t j = i;
            if (c == '0' && i + 1 < text.size() && (text[i + 1] == 'x' || text[i + 1] == 'X')) {
                base = 16;
                j += 2;
            } else if (c == '0' && i + 1 < text.size() && (text[i + 1] == 'b' || text[i + 1] == 'B')) {
                base = 2;
                j += 2;
            }
            const std::size_t digits_start = j;
            BigInt v = 0;
            while (j < text.size() && std::isalnum(static_cast<unsigned char>(text[j]))) {
                int d = digit_value(text[j]);
                if (d >= static_cast<int>(base)) throw ParseError("malformed number", tl, tc);
                v = v * base + d;
                ++j;
            }
            if (j == digits_start) throw ParseError("malformed number", tl, tc);
            out.push_back({Token::Number, text.substr(i, j - i), v, tl, tc});
            advance(j - i);
            continue;
        }
        bool matched = false;
        for (auto op : kTwoChar) {
            if (text.compare(i, op.size(), op) == 0) {
                out.push_back({Token::Punct, std::string(op), 0, tl, tc});
                advance(op.size());
                matched = true;
                break;
            }
        }
        if (matched) continue;
        if (kOneChar.find(c) != std::string_view::npos) {
            out.push_back({Token::Punct, std::string(1, c), 0, tl, tc});
            advance(1);
            continue;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", tl, tc);
    }
    out.push_back({Token::End, "", 0, line, col});
    return out;
}

} // namespace hedcheck::dfl
