// dsl.hpp
//
// Line-oriented circuit description language (.hqc). One statement per
// line, comments with '#':
//
//   path <name>
//   param <name> = <number | expression>
//   source pair <pathA> <pathB> [flipped]
//   source ghz <path> <path> <path...> [flipped]
//   elem <kind> <in ports> [-> <out ports>] [key=value ...]
//   measure <path> basis=<hv|diag> slots=<list|all>
//   postselect one-photon <paths...>
//   postselect slots <path> keep=<list>
//
// Expressions know numbers, parameter names, + - * / with parentheses, and
// sqrt/cos/sin/acos/asin. `source` builds the shared input state from the
// bound parameters alpha2/beta2/delta2/eta2 (the complements are inferred
// when omitted); `flipped` swaps the H/V and early/late roles, which is how
// the second copy of the two-copy scheme enters.

#pragma once

#include "hyperconc/pipeline.hpp"

#include <charconv>
#include <sstream>

namespace hyperconc::dsl {

struct SourceSpan {
    int line = 0;    // 1-based
    int column = 0;  // 1-based
};

struct Diagnostic {
    enum class Severity { ERROR, WARNING };
    Severity severity = Severity::ERROR;
    std::string message;
    SourceSpan span;
};

using Diagnostics = std::vector<Diagnostic>;

inline bool has_errors(const Diagnostics& ds) {
    for (const auto& d : ds)
        if (d.severity == Diagnostic::Severity::ERROR) return true;
    return false;
}

inline std::string to_string(const Diagnostic& d) {
    std::ostringstream os;
    os << (d.severity == Diagnostic::Severity::ERROR ? "error" : "warning") << " at " << d.span.line
       << ":" << d.span.column << ": " << d.message;
    return os.str();
}

// --- expressions -------------------------------------------------------------

// Parameter environment: name -> value.
using Env = std::map<std::string, double>;

class ExprError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

// Minimal recursive-descent evaluator over the expression source text.
class ExprEval {
public:
    ExprEval(std::string_view text, const Env& env) : text_(text), env_(env) {}

    double run() {
        double v = sum();
        skip_ws();
        if (pos_ != text_.size()) throw ExprError("trailing characters in expression");
        return v;
    }

private:
    double sum() {
        double v = product();
        for (;;) {
            skip_ws();
            if (peek() == '+') {
                ++pos_;
                v += product();
            } else if (peek() == '-') {
                ++pos_;
                v -= product();
            } else {
                return v;
            }
        }
    }

    double product() {
        double v = unary();
        for (;;) {
            skip_ws();
            if (peek() == '*') {
                ++pos_;
                v *= unary();
            } else if (peek() == '/') {
                ++pos_;
                const double d = unary();
                if (d == 0.0) throw ExprError("division by zero");
                v /= d;
            } else {
                return v;
            }
        }
    }

    double unary() {
        skip_ws();
        if (peek() == '-') {
            ++pos_;
            return -unary();
        }
        return atom();
    }

    double atom() {
        skip_ws();
        const char c = peek();
        if (c == '(') {
            ++pos_;
            double v = sum();
            skip_ws();
            if (peek() != ')') throw ExprError("missing ')'");
            ++pos_;
            return v;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return name_or_call();
        throw ExprError("malformed expression");
    }

    double number() {
        double v = 0.0;
        const char* begin = text_.data() + pos_;
        const char* end = text_.data() + text_.size();
        auto [ptr, ec] = std::from_chars(begin, end, v);
        if (ec != std::errc()) throw ExprError("malformed number");
        pos_ += std::size_t(ptr - begin);
        return v;
    }

    double name_or_call() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        const std::string name(text_.substr(start, pos_ - start));
        skip_ws();
        if (peek() == '(') {
            ++pos_;
            double arg = sum();
            skip_ws();
            if (peek() != ')') throw ExprError("missing ')' after function argument");
            ++pos_;
            if (name == "sqrt") {
                if (arg < 0.0) throw ExprError("sqrt of a negative value");
                return std::sqrt(arg);
            }
            if (name == "acos") return std::acos(arg);
            if (name == "asin") return std::asin(arg);
            if (name == "cos") return std::cos(arg);
            if (name == "sin") return std::sin(arg);
            throw ExprError("unknown function '" + name + "'");
        }
        auto it = env_.find(name);
        if (it == env_.end()) throw ExprError("unbound parameter '" + name + "'");
        return it->second;
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    std::string_view text_;
    const Env& env_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline double eval_expr(const std::string& text, const Env& env) {
    return detail::ExprEval(text, env).run();
}

// --- abstract syntax ----------------------------------------------------------

struct PathDecl {
    std::string name;
    SourceSpan span;
};

struct ParamDecl {
    std::string name;
    std::string expr;  // source text, evaluated at elaboration
    SourceSpan span;
};

struct SourceStmt {
    enum class Kind { PAIR, GHZ };
    Kind kind = Kind::PAIR;
    std::vector<std::string> paths;
    bool flipped = false;
    SourceSpan span;
};

struct ElemStmt {
    std::string kind;
    std::vector<std::string> ins;
    std::vector<std::string> outs;
    std::vector<std::pair<std::string, std::string>> args;  // key, expression text
    SourceSpan span;

    const std::string* arg(const std::string& key) const {
        for (const auto& [k, v] : args)
            if (k == key) return &v;
        return nullptr;
    }
};

struct MeasureStmt {
    std::string path;
    MeasurementBasis basis = MeasurementBasis::HV;
    std::set<int> slots;  // empty = all
    SourceSpan span;
};

struct PostselectOneStmt {
    std::vector<std::string> paths;
    SourceSpan span;
};

struct PostselectSlotsStmt {
    std::string path;
    std::set<int> keep;
    SourceSpan span;
};

using Statement =
    std::variant<SourceStmt, ElemStmt, MeasureStmt, PostselectOneStmt, PostselectSlotsStmt>;

struct CircuitDoc {
    std::vector<PathDecl> paths;
    std::vector<ParamDecl> params;
    std::vector<Statement> statements;

    bool declares_path(const std::string& name) const {
        for (const auto& p : paths)
            if (p.name == name) return true;
        return false;
    }
};

struct ParseResult {
    CircuitDoc doc;
    Diagnostics diagnostics;
    bool ok() const { return !has_errors(diagnostics); }
};

// --- element signature table ---------------------------------------------------

namespace detail {

struct ElemSignature {
    int ins = 1;
    int outs = 0;  // 0: acts in place
    std::vector<std::string> required_args;
    std::vector<std::string> optional_args;
};

inline const std::map<std::string, ElemSignature>& elem_signatures() {
    static const std::map<std::string, ElemSignature> table = {
        {"pbs_hv", {2, 2, {}, {}}},
        {"pbs_diag", {2, 2, {}, {}}},
        {"bs50", {2, 2, {}, {}}},
        {"ubs", {1, 2, {"t", "r"}, {}}},
        {"waveplate", {1, 0, {"theta"}, {}}},
        {"pol_flip", {1, 0, {}, {}}},
        {"pockels", {1, 0, {"slots"}, {}}},
        {"delay", {1, 0, {"dt"}, {}}},
        {"plain_ui", {1, 0, {}, {"dt"}}},
        {"pol_routed_delay", {1, 0, {"long"}, {"dt"}}},
        {"tb_converter", {1, 2, {}, {}}},
    };
    return table;
}

struct Token {
    std::string text;
    int column = 0;  // 1-based
};

inline std::vector<Token> tokenize(const std::string& line) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        if (std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
            continue;
        }
        if (line[i] == '#') break;
        const std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) &&
               line[i] != '#')
            ++i;
        tokens.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
    }
    return tokens;
}

inline bool parse_int_list(const std::string& text, std::set<int>& out) {
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        int v = 0;
        auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + comma, v);
        if (ec != std::errc() || ptr != text.data() + comma || v < 0) return false;
        out.insert(v);
        pos = comma + 1;
    }
    return !out.empty();
}

inline bool valid_name(const std::string& s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.')) return false;
    return true;
}

}  // namespace detail

// --- parser ---------------------------------------------------------------------

inline ParseResult parse(const std::string& text) {
    using detail::Token;
    ParseResult result;
    auto& doc = result.doc;
    auto& diags = result.diagnostics;

    auto error = [&](int line, int col, std::string msg) {
        diags.push_back({Diagnostic::Severity::ERROR, std::move(msg), {line, col}});
    };

    auto require_declared = [&](const Token& t, int line) {
        if (!doc.declares_path(t.text)) {
            error(line, t.column, "undeclared path '" + t.text + "'");
            return false;
        }
        return true;
    };

    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto tokens = detail::tokenize(line);
        if (tokens.empty()) continue;
        const std::string& head = tokens[0].text;

        if (head == "path") {
            if (tokens.size() != 2) {
                error(line_no, tokens[0].column, "expected: path <name>");
                continue;
            }
            if (!detail::valid_name(tokens[1].text)) {
                error(line_no, tokens[1].column, "malformed path name '" + tokens[1].text + "'");
                continue;
            }
            if (doc.declares_path(tokens[1].text)) {
                error(line_no, tokens[1].column, "path '" + tokens[1].text + "' declared twice");
                continue;
            }
            doc.paths.push_back({tokens[1].text, {line_no, tokens[1].column}});
        } else if (head == "param") {
            if (tokens.size() < 4 || tokens[2].text != "=") {
                error(line_no, tokens[0].column, "expected: param <name> = <expr>");
                continue;
            }
            if (!detail::valid_name(tokens[1].text)) {
                error(line_no, tokens[1].column, "malformed parameter name");
                continue;
            }
            std::string expr;
            for (std::size_t i = 3; i < tokens.size(); ++i) {
                if (!expr.empty()) expr += " ";
                expr += tokens[i].text;
            }
            doc.params.push_back({tokens[1].text, expr, {line_no, tokens[1].column}});
        } else if (head == "source") {
            if (tokens.size() < 2 || (tokens[1].text != "pair" && tokens[1].text != "ghz")) {
                error(line_no, tokens[0].column, "expected: source pair|ghz <paths...> [flipped]");
                continue;
            }
            SourceStmt s;
            s.kind = tokens[1].text == "pair" ? SourceStmt::Kind::PAIR : SourceStmt::Kind::GHZ;
            s.span = {line_no, tokens[0].column};
            std::size_t end = tokens.size();
            if (end > 2 && tokens[end - 1].text == "flipped") {
                s.flipped = true;
                --end;
            }
            bool ok = true;
            for (std::size_t i = 2; i < end; ++i) {
                ok = require_declared(tokens[i], line_no) && ok;
                s.paths.push_back(tokens[i].text);
            }
            const bool arity_ok = s.kind == SourceStmt::Kind::PAIR ? s.paths.size() == 2
                                                                   : s.paths.size() >= 2;
            if (!arity_ok) {
                error(line_no, tokens[0].column,
                      s.kind == SourceStmt::Kind::PAIR ? "source pair needs exactly 2 paths"
                                                       : "source ghz needs at least 2 paths");
                ok = false;
            }
            if (ok) doc.statements.push_back(std::move(s));
        } else if (head == "elem") {
            if (tokens.size() < 3) {
                error(line_no, tokens[0].column, "expected: elem <kind> <ports...> [key=value...]");
                continue;
            }
            auto sig_it = detail::elem_signatures().find(tokens[1].text);
            if (sig_it == detail::elem_signatures().end()) {
                error(line_no, tokens[1].column, "unknown element kind '" + tokens[1].text + "'");
                continue;
            }
            const auto& sig = sig_it->second;
            ElemStmt e;
            e.kind = tokens[1].text;
            e.span = {line_no, tokens[1].column};
            bool after_arrow = false;
            bool ok = true;
            for (std::size_t i = 2; i < tokens.size(); ++i) {
                const std::string& t = tokens[i].text;
                if (t == "->") {
                    if (after_arrow) {
                        error(line_no, tokens[i].column, "duplicate '->'");
                        ok = false;
                    }
                    after_arrow = true;
                } else if (t.find('=') != std::string::npos) {
                    const auto eq = t.find('=');
                    const std::string key = t.substr(0, eq);
                    const std::string value = t.substr(eq + 1);
                    if (key.empty() || value.empty()) {
                        error(line_no, tokens[i].column, "malformed key=value argument");
                        ok = false;
                    } else {
                        e.args.emplace_back(key, value);
                    }
                } else {
                    ok = require_declared(tokens[i], line_no) && ok;
                    (after_arrow ? e.outs : e.ins).push_back(t);
                }
            }
            if (static_cast<int>(e.ins.size()) != sig.ins ||
                static_cast<int>(e.outs.size()) != (after_arrow ? sig.outs : 0)) {
                error(line_no, tokens[1].column,
                      "element '" + e.kind + "' takes " + std::to_string(sig.ins) + " input port(s)" +
                          (sig.outs ? " and " + std::to_string(sig.outs) + " output port(s)" : ""));
                ok = false;
            }
            if (sig.outs > 0 && !after_arrow) {
                error(line_no, tokens[1].column, "element '" + e.kind + "' needs '-> <out ports>'");
                ok = false;
            }
            for (const auto& req : sig.required_args) {
                if (!e.arg(req)) {
                    error(line_no, tokens[1].column,
                          "element '" + e.kind + "' needs argument " + req + "=...");
                    ok = false;
                }
            }
            for (const auto& [key, value] : e.args) {
                const bool known =
                    std::count(sig.required_args.begin(), sig.required_args.end(), key) ||
                    std::count(sig.optional_args.begin(), sig.optional_args.end(), key);
                if (!known) {
                    error(line_no, tokens[1].column,
                          "element '" + e.kind + "' does not take argument '" + key + "'");
                    ok = false;
                }
            }
            if (ok) doc.statements.push_back(std::move(e));
        } else if (head == "measure") {
            if (tokens.size() < 2) {
                error(line_no, tokens[0].column, "expected: measure <path> basis=... slots=...");
                continue;
            }
            MeasureStmt m;
            m.span = {line_no, tokens[1].column};
            m.path = tokens[1].text;
            bool ok = require_declared(tokens[1], line_no);
            bool basis_seen = false, slots_seen = false;
            for (std::size_t i = 2; i < tokens.size(); ++i) {
                const std::string& t = tokens[i].text;
                if (t.rfind("basis=", 0) == 0) {
                    const std::string b = t.substr(6);
                    if (b == "hv")
                        m.basis = MeasurementBasis::HV;
                    else if (b == "diag")
                        m.basis = MeasurementBasis::DIAG;
                    else {
                        error(line_no, tokens[i].column, "basis must be hv or diag");
                        ok = false;
                    }
                    basis_seen = true;
                } else if (t.rfind("slots=", 0) == 0) {
                    const std::string s = t.substr(6);
                    if (s != "all" && !detail::parse_int_list(s, m.slots)) {
                        error(line_no, tokens[i].column, "malformed slot list '" + s + "'");
                        ok = false;
                    }
                    slots_seen = true;
                } else {
                    error(line_no, tokens[i].column, "unexpected token '" + t + "'");
                    ok = false;
                }
            }
            if (!basis_seen || !slots_seen) {
                error(line_no, tokens[0].column, "measure needs basis= and slots=");
                ok = false;
            }
            if (ok) doc.statements.push_back(std::move(m));
        } else if (head == "postselect") {
            if (tokens.size() >= 3 && tokens[1].text == "one-photon") {
                PostselectOneStmt p;
                p.span = {line_no, tokens[0].column};
                bool ok = true;
                for (std::size_t i = 2; i < tokens.size(); ++i) {
                    ok = require_declared(tokens[i], line_no) && ok;
                    p.paths.push_back(tokens[i].text);
                }
                if (ok) doc.statements.push_back(std::move(p));
            } else if (tokens.size() == 4 && tokens[1].text == "slots" &&
                       tokens[3].text.rfind("keep=", 0) == 0) {
                PostselectSlotsStmt p;
                p.span = {line_no, tokens[0].column};
                p.path = tokens[2].text;
                bool ok = require_declared(tokens[2], line_no);
                if (!detail::parse_int_list(tokens[3].text.substr(5), p.keep)) {
                    error(line_no, tokens[3].column, "malformed slot list");
                    ok = false;
                }
                if (ok) doc.statements.push_back(std::move(p));
            } else {
                error(line_no, tokens[0].column,
                      "expected: postselect one-photon <paths> | postselect slots <path> keep=<list>");
            }
        } else {
            error(line_no, tokens[0].column, "unknown statement '" + head + "'");
        }
    }
    return result;
}

// --- validation -------------------------------------------------------------------

inline Diagnostics validate(const CircuitDoc& doc) {
    Diagnostics diags;
    auto error = [&](const SourceSpan& span, std::string msg) {
        diags.push_back({Diagnostic::Severity::ERROR, std::move(msg), span});
    };
    auto warn = [&](const SourceSpan& span, std::string msg) {
        diags.push_back({Diagnostic::Severity::WARNING, std::move(msg), span});
    };

    // parameter environment with declared defaults, for range checks; any
    // parameter that does not evaluate yet is simply skipped here
    Env env;
    for (const auto& p : doc.params) {
        try {
            env[p.name] = eval_expr(p.expr, env);
        } catch (const ExprError&) {
        }
    }
    auto check_pair_norm = [&](const char* a, const char* b) {
        auto ia = env.find(a), ib = env.find(b);
        if (ia != env.end() && ib != env.end() && std::abs(ia->second + ib->second - 1.0) > 1e-9)
            warn(doc.params.front().span, std::string(a) + " + " + b + " = " +
                                              std::to_string(ia->second + ib->second) +
                                              " violates the normalization condition");
    };
    if (!doc.params.empty()) {
        check_pair_norm("alpha2", "beta2");
        check_pair_norm("delta2", "eta2");
    }

    // liveness: a path is live once a source or element feeds it; consuming
    // a path retires it until something writes to it again
    std::set<std::string> live, consumed;
    auto consume = [&](const std::string& p) {
        live.erase(p);
        consumed.insert(p);
    };
    auto produce = [&](const std::string& p) {
        live.insert(p);
        consumed.erase(p);
    };

    for (const auto& stmt : doc.statements) {
        if (const auto* s = std::get_if<SourceStmt>(&stmt)) {
            for (const auto& p : s->paths) {
                if (live.count(p)) error(s->span, "source writes to occupied path '" + p + "'");
                produce(p);
            }
        } else if (const auto* e = std::get_if<ElemStmt>(&stmt)) {
            for (const auto& p : e->ins)
                if (consumed.count(p)) error(e->span, "use of consumed path '" + p + "'");
            for (const auto& p : e->ins) consume(p);
            const auto& outs = e->outs.empty() ? e->ins : e->outs;
            for (const auto& p : outs) produce(p);

            // numeric range checks where the arguments already evaluate
            auto value_of = [&](const char* key) -> std::optional<double> {
                const auto* a = e->arg(key);
                if (!a) return std::nullopt;
                try {
                    return eval_expr(*a, env);
                } catch (const ExprError&) {
                    return std::nullopt;
                }
            };
            if (e->kind == "ubs") {
                // rounded decimal inputs are fine; elaboration renormalizes
                auto t = value_of("t"), r = value_of("r");
                if (t && r && std::abs(*t * *t + *r * *r - 1.0) > 1e-3)
                    error(e->span, "ubs coefficients violate t^2 + r^2 = 1");
            }
            if (e->kind == "delay") {
                auto dt = value_of("dt");
                if (dt && *dt < 0.0) error(e->span, "delay must be non-negative");
            }
            if (e->kind == "plain_ui") {
                auto dt = value_of("dt");
                if (dt && *dt < 1.0) error(e->span, "plain_ui delay must be at least 1");
            }
            if (e->kind == "pol_routed_delay") {
                const auto* l = e->arg("long");
                if (l && *l != "H" && *l != "V") error(e->span, "long= must be H or V");
            }
            if (e->kind == "pockels") {
                const auto* s = e->arg("slots");
                std::set<int> slots;
                if (s && !detail::parse_int_list(*s, slots))
                    error(e->span, "pockels slots= must be a non-negative integer list");
            }
        } else if (const auto* m = std::get_if<MeasureStmt>(&stmt)) {
            if (!live.count(m->path) && !consumed.count(m->path))
                warn(m->span, "measuring path '" + m->path + "' that nothing feeds");
            if (consumed.count(m->path)) error(m->span, "measuring consumed path '" + m->path + "'");
            consume(m->path);  // detection destroys the photons
        } else if (const auto* p1 = std::get_if<PostselectOneStmt>(&stmt)) {
            for (const auto& p : p1->paths)
                if (consumed.count(p))
                    error(p1->span, "post-selecting consumed path '" + p + "'");
        } else if (const auto* ps = std::get_if<PostselectSlotsStmt>(&stmt)) {
            if (consumed.count(ps->path))
                error(ps->span, "post-selecting consumed path '" + ps->path + "'");
        }
    }
    return diags;
}

// --- canonical rendering ------------------------------------------------------------

inline std::string render(const CircuitDoc& doc) {
    std::ostringstream os;
    for (const auto& p : doc.paths) os << "path " << p.name << "\n";
    for (const auto& p : doc.params) os << "param " << p.name << " = " << p.expr << "\n";
    for (const auto& stmt : doc.statements) {
        if (const auto* s = std::get_if<SourceStmt>(&stmt)) {
            os << "source " << (s->kind == SourceStmt::Kind::PAIR ? "pair" : "ghz");
            for (const auto& p : s->paths) os << " " << p;
            if (s->flipped) os << " flipped";
            os << "\n";
        } else if (const auto* e = std::get_if<ElemStmt>(&stmt)) {
            os << "elem " << e->kind;
            for (const auto& p : e->ins) os << " " << p;
            if (!e->outs.empty()) {
                os << " ->";
                for (const auto& p : e->outs) os << " " << p;
            }
            for (const auto& [k, v] : e->args) os << " " << k << "=" << v;
            os << "\n";
        } else if (const auto* m = std::get_if<MeasureStmt>(&stmt)) {
            os << "measure " << m->path
               << " basis=" << (m->basis == MeasurementBasis::DIAG ? "diag" : "hv") << " slots=";
            if (m->slots.empty()) {
                os << "all";
            } else {
                bool first = true;
                for (int s : m->slots) {
                    if (!first) os << ",";
                    os << s;
                    first = false;
                }
            }
            os << "\n";
        } else if (const auto* p1 = std::get_if<PostselectOneStmt>(&stmt)) {
            os << "postselect one-photon";
            for (const auto& p : p1->paths) os << " " << p;
            os << "\n";
        } else if (const auto* ps = std::get_if<PostselectSlotsStmt>(&stmt)) {
            os << "postselect slots " << ps->path << " keep=";
            bool first = true;
            for (int s : ps->keep) {
                if (!first) os << ",";
                os << s;
                first = false;
            }
            os << "\n";
        }
    }
    return os.str();
}

// --- elaboration ---------------------------------------------------------------------

class ElaborationError : public std::runtime_error {
public:
    ElaborationError(const std::string& msg, SourceSpan span)
        : std::runtime_error(msg), span(span) {}
    SourceSpan span;
};

struct Elaboration {
    PhotonicState initial;      // empty unless the document has source statements
    Pipeline pipeline;
    Env env;                    // final parameter bindings
    DetectorModel model = DetectorModel::NUMBER_RESOLVING;
};

inline Elaboration elaborate(const CircuitDoc& doc, const Env& bindings = {},
                             DetectorModel model = DetectorModel::NUMBER_RESOLVING) {
    Elaboration el;
    el.model = model;

    // declared parameter expressions evaluate in order; explicit bindings win
    for (const auto& p : doc.params) {
        if (auto it = bindings.find(p.name); it != bindings.end()) {
            el.env[p.name] = it->second;
            continue;
        }
        try {
            el.env[p.name] = eval_expr(p.expr, el.env);
        } catch (const ExprError& e) {
            throw ElaborationError("parameter '" + p.name + "': " + e.what(), p.span);
        }
    }
    for (const auto& [k, v] : bindings) el.env.emplace(k, v);  // binds without declarations

    auto env_value = [&](const std::string& name, const SourceSpan& span) {
        auto it = el.env.find(name);
        if (it == el.env.end()) throw ElaborationError("unbound parameter '" + name + "'", span);
        return it->second;
    };
    auto eval_in = [&](const std::string& text, const SourceSpan& span) {
        try {
            return eval_expr(text, el.env);
        } catch (const ExprError& e) {
            throw ElaborationError(e.what(), span);
        }
    };

    auto source_params = [&](const SourceSpan& span) {
        const double a2 = env_value("alpha2", span);
        const double b2 = el.env.count("beta2") ? el.env.at("beta2") : 1.0 - a2;
        const double d2 = env_value("delta2", span);
        const double e2 = el.env.count("eta2") ? el.env.at("eta2") : 1.0 - d2;
        if (std::abs(a2 + b2 - 1.0) > 1e-9 || std::abs(d2 + e2 - 1.0) > 1e-9)
            throw ElaborationError("source parameters violate the normalization condition", span);
        StateParams p{std::sqrt(a2), std::sqrt(b2), std::sqrt(d2), std::sqrt(e2)};
        return p;
    };

    for (const auto& stmt : doc.statements) {
        if (const auto* s = std::get_if<SourceStmt>(&stmt)) {
            auto params = source_params(s->span);
            if (s->flipped) params = params.flipped();
            auto state = build_ghz(params, std::vector<PathLabel>(s->paths.begin(), s->paths.end()));
            el.initial = el.initial.empty() ? state : tensor(el.initial, state);
        } else if (const auto* e = std::get_if<ElemStmt>(&stmt)) {
            auto num = [&](const char* key, double fallback = 0.0, bool required = true) {
                const auto* a = e->arg(key);
                if (!a) {
                    if (required) throw ElaborationError(std::string("missing ") + key, e->span);
                    return fallback;
                }
                return eval_in(*a, e->span);
            };
            try {
                if (e->kind == "pbs_hv") {
                    el.pipeline.add(pbs_hv(e->ins[0], e->ins[1], e->outs[0], e->outs[1]));
                } else if (e->kind == "pbs_diag") {
                    el.pipeline.add(pbs_diag(e->ins[0], e->ins[1], e->outs[0], e->outs[1]));
                } else if (e->kind == "bs50") {
                    el.pipeline.add(bs50(e->ins[0], e->ins[1], e->outs[0], e->outs[1]));
                } else if (e->kind == "ubs") {
                    const double t = num("t"), r = num("r");
                    const double n = std::sqrt(t * t + r * r);
                    if (std::abs(n - 1.0) > 1e-3)
                        throw ElaborationError("ubs coefficients violate t^2 + r^2 = 1", e->span);
                    el.pipeline.add(ubs(t / n, r / n, e->ins[0], e->outs[0], e->outs[1]));
                } else if (e->kind == "waveplate") {
                    el.pipeline.add(waveplate(e->ins[0], num("theta")));
                } else if (e->kind == "pol_flip") {
                    el.pipeline.add(pol_flip(e->ins[0]));
                } else if (e->kind == "pockels") {
                    std::set<int> slots;
                    if (!detail::parse_int_list(*e->arg("slots"), slots))
                        throw ElaborationError("malformed slots list", e->span);
                    el.pipeline.add(pockels(e->ins[0], std::move(slots)));
                } else if (e->kind == "delay") {
                    el.pipeline.add(delay(e->ins[0], static_cast<int>(num("dt"))));
                } else if (e->kind == "plain_ui") {
                    el.pipeline.add(plain_ui(e->ins[0], static_cast<int>(num("dt", 1.0, false))));
                } else if (e->kind == "pol_routed_delay") {
                    const auto* l = e->arg("long");
                    if (!l || (*l != "H" && *l != "V"))
                        throw ElaborationError("pol_routed_delay needs long=H or long=V", e->span);
                    el.pipeline.add(pol_routed_delay(
                        e->ins[0], *l == "H" ? Polarization::H : Polarization::V,
                        static_cast<int>(num("dt", 1.0, false))));
                } else if (e->kind == "tb_converter") {
                    el.pipeline.add(tb_converter(e->ins[0], e->outs[0], e->outs[1]));
                } else {
                    throw ElaborationError("unknown element kind '" + e->kind + "'", e->span);
                }
            } catch (const std::invalid_argument& ex) {
                throw ElaborationError(ex.what(), e->span);
            }
        } else if (const auto* m = std::get_if<MeasureStmt>(&stmt)) {
            el.pipeline.detection.monitored.push_back({m->path, m->basis, m->slots});
        } else if (const auto* p1 = std::get_if<PostselectOneStmt>(&stmt)) {
            el.pipeline.add_one_photon(std::set<PathLabel>(p1->paths.begin(), p1->paths.end()),
                                       "postselect one-photon");
        } else if (const auto* ps = std::get_if<PostselectSlotsStmt>(&stmt)) {
            el.pipeline.add_slot_window({{ps->path, ps->keep}}, "postselect slots " + ps->path);
        }
    }
    el.pipeline.detection.model = model;
    return el;
}

// Parse, validate, elaborate and run a circuit document in one step.
struct CircuitRun {
    Diagnostics diagnostics;
    bool ok = false;
    EngineReport report;
};

inline CircuitRun run_circuit(const std::string& text, const Env& bindings = {},
                              DetectorModel model = DetectorModel::NUMBER_RESOLVING) {
    CircuitRun run;
    auto parsed = parse(text);
    run.diagnostics = parsed.diagnostics;
    if (!parsed.ok()) return run;
    auto vd = validate(parsed.doc);
    run.diagnostics.insert(run.diagnostics.end(), vd.begin(), vd.end());
    if (has_errors(run.diagnostics)) return run;
    try {
        auto el = elaborate(parsed.doc, bindings, model);
        if (el.initial.empty())
            throw ElaborationError("circuit has no source statement; nothing to run", {1, 1});
        run.report = run_pipeline(el.initial, el.pipeline);
        run.ok = true;
    } catch (const ElaborationError& e) {
        run.diagnostics.push_back({Diagnostic::Severity::ERROR, e.what(), e.span});
    } catch (const std::exception& e) {
        // execution failures (unmapped modes, empty measurements) carry no
        // span of their own; report them against the document start
        run.diagnostics.push_back({Diagnostic::Severity::ERROR, e.what(), {1, 1}});
    }
    return run;
}

}  // namespace hyperconc::dsl
