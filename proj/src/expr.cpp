#include "isac/expr.hpp"

#include "isac/errors.hpp"

#include <algorithm>
#include <cctype>

namespace isac {

namespace {

class Parser {
public:
    Parser(std::string_view text, const VarList& known) : s_(text), known_(known) {}

    InfoExpr run() {
        InfoExpr e;
        skip();
        const char head = take_letter();
        if (head == 'I')
            e.kind = InfoExpr::Kind::Mutual;
        else if (head == 'H')
            e.kind = InfoExpr::Kind::Entropy;
        else
            fail("expected 'I' or 'H'", pos_ - 1);
        expect('(');
        e.a = list();
        if (e.kind == InfoExpr::Kind::Mutual) {
            expect(';');
            e.b = list();
        }
        skip();
        if (peek() == '|') {
            ++pos_;
            e.given = list();
        }
        expect(')');
        skip();
        if (pos_ != s_.size()) fail("unexpected trailing input", pos_);
        check_disjoint(e);
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg, std::size_t at) const {
        throw ParseError(msg, 1, static_cast<int>(at) + 1);
    }
    char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    char take_letter() {
        const char c = peek();
        ++pos_;
        return c;
    }
    void expect(char c) {
        skip();
        if (peek() != c) fail(std::string("expected '") + c + "'", pos_);
        ++pos_;
    }

    static bool name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

    // Splits a run of name characters into known names, longest prefix first.
    void split(std::string_view word, std::size_t at, VarList& out) const {
        if (std::find(known_.begin(), known_.end(), word) != known_.end()) {
            out.emplace_back(word);
            return;
        }
        std::size_t i = 0;
        while (i < word.size()) {
            std::size_t best = 0;
            for (const auto& k : known_)
                if (k.size() > best && word.substr(i, k.size()) == k) best = k.size();
            if (best == 0) fail("unknown variable in '" + std::string(word) + "'", at + i);
            out.emplace_back(word.substr(i, best));
            i += best;
        }
    }

    VarList list() {
        VarList out;
        for (;;) {
            skip();
            if (peek() == ',') {
                ++pos_;
                continue;
            }
            if (!name_char(peek())) break;
            const std::size_t start = pos_;
            while (name_char(peek())) ++pos_;
            split(s_.substr(start, pos_ - start), start, out);
        }
        if (out.empty()) fail("expected a variable name", pos_);
        return out;
    }

    void check_disjoint(const InfoExpr& e) const {
        std::vector<std::string> all = e.variables();
        std::sort(all.begin(), all.end());
        if (auto it = std::adjacent_find(all.begin(), all.end()); it != all.end())
            throw ArgumentError("variable '" + *it + "' appears more than once in " + e.str());
    }

    std::string_view s_;
    const VarList& known_;
    std::size_t pos_ = 0;
};

std::string join(const VarList& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
    return out;
}

}  // namespace

VarList InfoExpr::variables() const {
    VarList all = a;
    all.insert(all.end(), b.begin(), b.end());
    all.insert(all.end(), given.begin(), given.end());
    return all;
}

std::string InfoExpr::str() const {
    std::string out = kind == Kind::Mutual ? "I(" + join(a) + ";" + join(b) : "H(" + join(a);
    if (!given.empty()) out += "|" + join(given);
    return out + ")";
}

InfoExpr parse_info_expr(std::string_view text, const VarList& known) { return Parser(text, known).run(); }

double evaluate(const InfoExpr& e, const JointDist& joint) {
    return e.kind == InfoExpr::Kind::Mutual ? mutual_info(joint, e.a, e.b, e.given) : entropy(joint, e.a, e.given);
}

}  // namespace isac
