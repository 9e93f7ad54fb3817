#pragma once

// Text format for Expressions.
//
// Grammar (EBNF):
//   expr    = [sign] term { sign term } ;
//   sign    = "+" | "-" ;
//   term    = factor { "*" factor } ;
//   factor  = ( number | jetref | inner | atom | "(" expr ")" ) [ "^" integer ] ;
//   number  = integer [ "/" integer ] ;
//   jetref  = family "[" integer "]" [ "'" integer ] ;
//   inner   = "<" vecref "," vecref ">" ;            (* sum over components *)
//   vecref  = family [ "'" integer ] ;
//   atom    = "Dxi" "(" expr ")" ;
//   family  = "u" | "P" | "Q" | "h" ;
//
// `u[2]'3` is the third x-derivative of the second component of u; `<u,u'1>`
// expands to sum_i u[i]*u[i]'1 for the ambient dimension supplied to parse().
// print() emits the fully expanded component form; parse(print(e)) == e.

#include <cctype>
#include <sstream>
#include <string>

#include "vmkdv/expr.hpp"

namespace vmkdv {

std::string print(const Expression& e);

inline std::string print_monomial(const Monomial& m, const Rat& coeff, bool lead) {
    std::ostringstream os;
    Rat c = coeff;
    if (c < 0) {
        os << (lead ? "-" : " - ");
        c = -c;
    } else if (!lead) {
        os << " + ";
    }
    std::vector<std::string> factors;
    if (c != 1 || (m.jets.empty() && m.atoms.empty()))
        factors.push_back(c.str());
    for (auto& [j, p] : m.jets) {
        std::ostringstream f;
        f << family_name(j.fam) << "[" << j.comp << "]";
        if (j.order > 0) f << "'" << j.order;
        if (p > 1) f << "^" << p;
        factors.push_back(f.str());
    }
    for (auto& [arg, p] : m.atoms) {
        std::ostringstream f;
        f << "Dxi(" << print(*arg) << ")";
        if (p > 1) f << "^" << p;
        factors.push_back(f.str());
    }
    for (size_t i = 0; i < factors.size(); ++i) {
        if (i) os << "*";
        os << factors[i];
    }
    return os.str();
}

inline std::string print(const Expression& e) {
    if (e.is_zero()) return "0";
    std::string out;
    bool lead = true;
    for (auto& [m, c] : e.terms()) {
        out += print_monomial(m, c, lead);
        lead = false;
    }
    return out;
}

class Parser {
public:
    Parser(std::string_view text, int n) : s_(text), n_(n) {}

    Expression parse_expr() {
        Expression e;
        skip_ws();
        bool neg = false;
        if (peek() == '+' || peek() == '-') neg = (get() == '-');
        e += signed_term(neg);
        for (skip_ws(); peek() == '+' || peek() == '-'; skip_ws())
            e += signed_term(get() == '-');
        return e;
    }

    bool at_end() {
        skip_ws();
        return pos_ >= s_.size();
    }

private:
    Expression signed_term(bool neg) {
        Expression t = parse_term();
        return neg ? -t : t;
    }

    Expression parse_term() {
        Expression t = parse_factor();
        for (skip_ws(); peek() == '*'; skip_ws()) {
            get();
            t *= parse_factor();
        }
        return t;
    }

    Expression parse_factor() {
        skip_ws();
        Expression base;
        char c = peek();
        if (std::isdigit(c)) {
            base = Expression(parse_rational());
        } else if (c == '<') {
            base = parse_inner();
        } else if (c == '(') {
            get();
            base = parse_expr();
            expect(')');
        } else if (s_.compare(pos_, 4, "Dxi(") == 0) {
            pos_ += 4;
            Expression arg = parse_expr();
            expect(')');
            base = Dxi(arg);
        } else {
            base = parse_jetref();
        }
        skip_ws();
        if (peek() == '^') {
            get();
            long p = parse_int();
            Expression powed(Rat(1));
            for (long i = 0; i < p; ++i) powed *= base;
            base = powed;
        }
        return base;
    }

    Expression parse_inner() {
        expect('<');
        auto [f1, o1] = parse_vecref();
        expect(',');
        auto [f2, o2] = parse_vecref();
        expect('>');
        Expression sum;
        for (int i = 1; i <= n_ - 1; ++i)
            sum += jet(f1, i, o1) * jet(f2, i, o2);
        return sum;
    }

    std::pair<Family, int> parse_vecref() {
        Family f = parse_family();
        int order = 0;
        skip_ws();
        if (peek() == '\'') {
            get();
            order = static_cast<int>(parse_int());
        }
        return {f, order};
    }

    Expression parse_jetref() {
        Family f = parse_family();
        expect('[');
        int comp = static_cast<int>(parse_int());
        expect(']');
        int order = 0;
        if (peek() == '\'') {
            get();
            order = static_cast<int>(parse_int());
        }
        return jet(f, comp, order);
    }

    Family parse_family() {
        skip_ws();
        switch (get()) {
            case 'u': return Family::u;
            case 'P': return Family::P;
            case 'Q': return Family::Q;
            case 'h': return Family::h;
        }
        fail("expected family name u|P|Q|h");
        return Family::u;
    }

    Rat parse_rational() {
        std::string num = parse_digits();
        if (peek() == '/') {
            get();
            std::string den = parse_digits();
            return Rat(boost::multiprecision::cpp_int(num),
                       boost::multiprecision::cpp_int(den));
        }
        return Rat(boost::multiprecision::cpp_int(num));
    }

    long parse_int() {
        skip_ws();
        return std::stol(parse_digits());
    }

    std::string parse_digits() {
        skip_ws();
        std::string d;
        while (std::isdigit(peek())) d += get();
        if (d.empty()) fail("expected digits");
        return d;
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
    }
    char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
    char get() { return pos_ < s_.size() ? s_[pos_++] : '\0'; }
    void expect(char c) {
        skip_ws();
        if (get() != c) fail(std::string("expected '") + c + "'");
    }
    [[noreturn]] void fail(const std::string& why) {
        throw Error("parse error at offset " + std::to_string(pos_) + ": " + why);
    }

    std::string_view s_;
    size_t pos_ = 0;
    int n_;
};

inline Expression parse(std::string_view text, int n) {
    Parser p(text, n);
    Expression e = p.parse_expr();
    if (!p.at_end()) throw Error("parse error: trailing input");
    return e;
}

}  // namespace vmkdv
