#include "fsq/sqlf.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "fsq/error.hpp"
#include "text_util.hpp"

namespace fsq {

namespace {

enum class Tok { Select, Distinct, From, Where, And, In, Name, Int, Num, Comma, LParen, RParen, Star, Semi, End };

struct Token {
    Tok kind;
    std::string text;
    std::size_t line;
    std::size_t column;
};

const char* describe(Tok kind)
{
    switch (kind) {
        case Tok::Select: return "SELECT";
        case Tok::Distinct: return "DISTINCT";
        case Tok::From: return "FROM";
        case Tok::Where: return "WHERE";
        case Tok::And: return "AND";
        case Tok::In: return "IN";
        case Tok::Name: return "name";
        case Tok::Int: return "integer";
        case Tok::Num: return "number";
        case Tok::Comma: return "','";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::Star: return "'*'";
        case Tok::Semi: return "';'";
        case Tok::End: return "end of input";
    }
    return "?";
}

std::string upper(std::string_view s)
{
    std::string out(s);
    for (auto& ch : out) {
        ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    }
    return out;
}

std::optional<Tok> keyword(std::string_view word)
{
    static const std::pair<const char*, Tok> table[] = {{"SELECT", Tok::Select}, {"DISTINCT", Tok::Distinct},
                                                        {"FROM", Tok::From},     {"WHERE", Tok::Where},
                                                        {"AND", Tok::And},       {"IN", Tok::In}};
    auto up = upper(word);
    for (const auto& [text, kind] : table) {
        if (up == text) {
            return kind;
        }
    }
    return std::nullopt;
}

bool ident_start(char ch) { return std::isalpha(static_cast<unsigned char>(ch)) || ch == '_'; }
bool ident_char(char ch) { return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_'; }
bool digit(char ch) { return std::isdigit(static_cast<unsigned char>(ch)) != 0; }

std::vector<Token> tokenize(std::string_view text)
{
    std::vector<Token> tokens;
    std::size_t i = 0;
    std::size_t line = 1;
    std::size_t column = 1;
    auto advance = [&](std::size_t count) {
        for (std::size_t k = 0; k < count; ++k) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
            ++i;
        }
    };
    while (i < text.size()) {
        char ch = text[i];
        if (std::isspace(static_cast<unsigned char>(ch))) {
            advance(1);
            continue;
        }
        std::size_t tl = line;
        std::size_t tc = column;
        if (ident_start(ch)) {
            std::size_t j = i;
            while (j < text.size() && ident_char(text[j])) {
                ++j;
            }
            std::string word(text.substr(i, j - i));
            auto kw = keyword(word);
            tokens.push_back({kw ? *kw : Tok::Name, word, tl, tc});
            advance(j - i);
        } else if (ch == '"') {
            std::string name;
            std::size_t j = i + 1;
            bool closed = false;
            while (j < text.size()) {
                if (text[j] == '"') {
                    if (j + 1 < text.size() && text[j + 1] == '"') {
                        name += '"';
                        j += 2;
                        continue;
                    }
                    closed = true;
                    ++j;
                    break;
                }
                name += text[j++];
            }
            if (!closed) {
                throw QueryError(fmt::format("{}:{}: unterminated quoted name", tl, tc), tl, tc, {"'\"'"});
            }
            if (name.empty()) {
                throw QueryError(fmt::format("{}:{}: empty quoted name", tl, tc), tl, tc, {"name"});
            }
            tokens.push_back({Tok::Name, name, tl, tc});
            advance(j - i);
        } else if (digit(ch) || (ch == '.' && i + 1 < text.size() && digit(text[i + 1]))) {
            std::size_t j = i;
            bool fractional = false;
            while (j < text.size() && digit(text[j])) {
                ++j;
            }
            if (j < text.size() && text[j] == '.') {
                fractional = true;
                ++j;
                while (j < text.size() && digit(text[j])) {
                    ++j;
                }
            }
            if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < text.size() && (text[k] == '+' || text[k] == '-')) {
                    ++k;
                }
                if (k < text.size() && digit(text[k])) {
                    fractional = true;
                    j = k;
                    while (j < text.size() && digit(text[j])) {
                        ++j;
                    }
                }
            }
            if (j < text.size() && ident_char(text[j])) {
                throw QueryError(fmt::format("{}:{}: malformed number '{}'", tl, tc, text.substr(i, j - i + 1)), tl,
                                 tc, {"integer", "number"});
            }
            tokens.push_back({fractional ? Tok::Num : Tok::Int, std::string(text.substr(i, j - i)), tl, tc});
            advance(j - i);
        } else {
            Tok kind;
            switch (ch) {
                case ',': kind = Tok::Comma; break;
                case '(': kind = Tok::LParen; break;
                case ')': kind = Tok::RParen; break;
                case '*': kind = Tok::Star; break;
                case ';': kind = Tok::Semi; break;
                default:
                    throw QueryError(fmt::format("{}:{}: unexpected character '{}'", tl, tc, ch), tl, tc);
            }
            tokens.push_back({kind, std::string(1, ch), tl, tc});
            advance(1);
        }
    }
    tokens.push_back({Tok::End, "", line, column});
    return tokens;
}

class Parser {
  public:
    explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

    QueryAst parse()
    {
        QueryAst ast;
        expect({Tok::Select});
        if (accept(Tok::Distinct)) {
            ast.distinct = true;
        }
        if (peek().kind == Tok::Int) {
            const Token& t = next();
            std::size_t k = 0;
            auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), k);
            if (ec != std::errc() || ptr != t.text.data() + t.text.size()) {
                fail_at(t, fmt::format("k '{}' is out of range", t.text), {});
            }
            if (k == 0) {
                fail_at(t, "k must be a positive integer", {});
            }
            ast.k = k;
        }
        if (peek().kind == Tok::Num) {
            const Token& t = next();
            auto value = detail::parse_double(t.text);
            if (!value || !(*value >= 0.0 && *value <= 1.0)) {
                fail_at(t, fmt::format("alpha {} is outside [0, 1]", t.text), {});
            }
            ast.alpha = *value;
        }
        if (accept(Tok::Star)) {
            ast.projection.reset();
        } else {
            std::vector<std::string> projection;
            std::set<Tok> expected{Tok::Star, Tok::Name};
            if (!ast.alpha) {
                expected.insert(Tok::Num);
                if (!ast.k) {
                    expected.insert(Tok::Int);
                    if (!ast.distinct) {
                        expected.insert(Tok::Distinct);
                    }
                }
            }
            projection.push_back(name(expected));
            while (accept(Tok::Comma)) {
                projection.push_back(name({Tok::Name}));
            }
            ast.projection = std::move(projection);
        }
        expect(ast.projection ? std::set<Tok>{Tok::Comma, Tok::From} : std::set<Tok>{Tok::From}, Tok::From);
        ast.relation = name({Tok::Name});
        expect({Tok::Where});
        do {
            ast.conditions.push_back(condition(ast.conditions));
        } while (accept(Tok::And));
        expect({Tok::And, Tok::Semi}, Tok::Semi);
        expect({Tok::End});
        return ast;
    }

  private:
    const Token& peek() const { return tokens_[pos_]; }

    const Token& next() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }

    bool accept(Tok kind)
    {
        if (peek().kind == kind) {
            next();
            return true;
        }
        return false;
    }

    [[noreturn]] void fail_at(const Token& t, const std::string& message, const std::set<Tok>& expected) const
    {
        std::set<std::string> names;
        for (Tok kind : expected) {
            names.insert(describe(kind));
        }
        std::string text = fmt::format("{}:{}: {}", t.line, t.column, message);
        if (!names.empty()) {
            text += fmt::format(" (expected {})", fmt::join(names, ", "));
        }
        throw QueryError(text, t.line, t.column, std::move(names));
    }

    [[noreturn]] void unexpected(const std::set<Tok>& expected) const
    {
        const Token& t = peek();
        std::string found = t.kind == Tok::End ? "end of input" : fmt::format("token \"{}\"", t.text);
        fail_at(t, fmt::format("syntax error at {}", found), expected);
    }

    /// Consumes `kind` (defaults to the only expected token) or reports `expected`.
    void expect(const std::set<Tok>& expected, std::optional<Tok> kind = std::nullopt)
    {
        Tok want = kind ? *kind : *expected.begin();
        if (!accept(want)) {
            unexpected(expected);
        }
    }

    std::string name(const std::set<Tok>& expected)
    {
        if (peek().kind != Tok::Name) {
            unexpected(expected);
        }
        return next().text;
    }

    Condition condition(const std::vector<Condition>& earlier)
    {
        const Token& at = peek();
        Condition cond;
        cond.attribute = name({Tok::Name});
        for (const auto& c : earlier) {
            if (c.attribute == cond.attribute) {
                fail_at(at, fmt::format("attribute '{}' is constrained twice", cond.attribute), {});
            }
        }
        expect({Tok::In});
        expect({Tok::LParen});
        do {
            const Token& label_at = peek();
            auto label = name({Tok::Name});
            if (std::find(cond.labels.begin(), cond.labels.end(), label) != cond.labels.end()) {
                fail_at(label_at, fmt::format("label '{}' listed twice", label), {});
            }
            cond.labels.push_back(std::move(label));
        } while (accept(Tok::Comma));
        expect({Tok::Comma, Tok::RParen}, Tok::RParen);
        return cond;
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

std::string quote_name(const std::string& name)
{
    bool plain = !name.empty() && ident_start(name[0]) &&
                 std::all_of(name.begin(), name.end(), [](char ch) { return ident_char(ch); }) && !keyword(name);
    if (plain) {
        return name;
    }
    std::string out = "\"";
    for (char ch : name) {
        out += ch;
        if (ch == '"') {
            out += '"';
        }
    }
    return out + "\"";
}

std::string alpha_literal(double alpha)
{
    auto text = detail::format_double(alpha);
    if (text.find_first_of(".eE") == std::string::npos) {
        text += ".0";
    }
    return text;
}

}  // namespace

QueryAst parse_query(std::string_view text)
{
    return Parser(tokenize(text)).parse();
}

std::string pretty_print(const QueryAst& ast)
{
    std::string out = "SELECT";
    if (ast.distinct) {
        out += " DISTINCT";
    }
    if (ast.k) {
        out += fmt::format(" {}", *ast.k);
    }
    if (ast.alpha) {
        out += " " + alpha_literal(*ast.alpha);
    }
    if (!ast.projection) {
        out += " *";
    } else {
        for (std::size_t i = 0; i < ast.projection->size(); ++i) {
            out += (i == 0 ? " " : ", ") + quote_name((*ast.projection)[i]);
        }
    }
    out += " FROM " + quote_name(ast.relation) + " WHERE ";
    for (std::size_t i = 0; i < ast.conditions.size(); ++i) {
        const auto& c = ast.conditions[i];
        if (i > 0) {
            out += " AND ";
        }
        out += quote_name(c.attribute) + " IN (";
        for (std::size_t j = 0; j < c.labels.size(); ++j) {
            out += (j == 0 ? "" : ", ") + quote_name(c.labels[j]);
        }
        out += ")";
    }
    return out + ";";
}

double default_alpha(std::span<const Clause> clauses, const LinguisticVocabulary& vocab)
{
    if (clauses.empty()) {
        throw PreconditionError("default alpha needs at least one non-vacuous condition");
    }
    std::size_t most = 0;
    for (const auto& clause : clauses) {
        most = std::max(most, vocab.attributes().at(clause.attribute).labels.size());
    }
    return 1.0 / static_cast<double>(most);
}

namespace {

std::string attribute_list(const LinguisticVocabulary& vocab)
{
    std::vector<std::string> names;
    for (const auto& a : vocab.attributes()) {
        names.push_back(a.name);
    }
    return fmt::format("{}", fmt::join(names, ", "));
}

std::string label_list(const Attribute& attr)
{
    std::vector<std::string> names;
    for (const auto& label : attr.labels) {
        std::string entry = label.name;
        if (!label.aliases.empty()) {
            entry += fmt::format(" ({})", fmt::join(label.aliases, ", "));
        }
        names.push_back(entry);
    }
    return fmt::format("{}", fmt::join(names, ", "));
}

[[noreturn]] void semantic_error(const std::string& message)
{
    throw QueryError(message, 0, 0);
}

}  // namespace

NormalizedQuery normalize(const QueryAst& ast, const LinguisticVocabulary& vocab, std::string_view relation)
{
    if (ast.conditions.empty()) {
        semantic_error("query has no conditions");
    }
    if (!relation.empty() && ast.relation != relation) {
        semantic_error(fmt::format("unknown relation '{}'; the loaded relation is '{}'", ast.relation, relation));
    }

    NormalizedQuery q;
    q.relation = ast.relation;
    q.distinct = ast.distinct;
    q.k = ast.k;

    std::vector<bool> is_input(vocab.attribute_count(), false);
    std::vector<Clause> clauses;
    for (const auto& cond : ast.conditions) {
        auto attribute = vocab.find_attribute(cond.attribute);
        if (!attribute) {
            semantic_error(fmt::format("unknown attribute '{}'; valid attributes: {}", cond.attribute,
                                       attribute_list(vocab)));
        }
        if (is_input[*attribute]) {
            semantic_error(fmt::format("attribute '{}' is constrained twice", cond.attribute));
        }
        is_input[*attribute] = true;
        const auto& attr = vocab.attributes()[*attribute];
        std::set<std::size_t> labels;
        for (const auto& name : cond.labels) {
            auto label = vocab.find_label(*attribute, name);
            if (!label) {
                semantic_error(fmt::format("unknown label '{}' for attribute '{}'; valid labels: {}", name,
                                           attr.name, label_list(attr)));
            }
            if (!labels.insert(*label).second) {
                semantic_error(fmt::format("label '{}' of attribute '{}' is listed twice", name, attr.name));
            }
        }
        Clause clause{*attribute, {labels.begin(), labels.end()}};
        // A lone label is a genuine fuzzy criterion, not a partition of the domain.
        if (attr.labels.size() > 1 && clause.labels.size() == attr.labels.size()) {
            continue;
        }
        clauses.push_back(std::move(clause));
    }
    std::sort(clauses.begin(), clauses.end(),
              [](const Clause& a, const Clause& b) { return a.attribute < b.attribute; });

    std::vector<bool> projected(vocab.attribute_count(), !ast.projection.has_value());
    if (ast.projection) {
        for (const auto& name : *ast.projection) {
            auto attribute = vocab.find_attribute(name);
            if (!attribute) {
                semantic_error(fmt::format("unknown attribute '{}' in projection; valid attributes: {}", name,
                                           attribute_list(vocab)));
            }
            projected[*attribute] = true;
        }
    }

    std::vector<bool> constrained(vocab.attribute_count(), false);
    for (const auto& clause : clauses) {
        constrained[clause.attribute] = true;
        auto& names = q.required[vocab.attributes()[clause.attribute].name];
        for (auto m : clause.labels) {
            names.push_back(vocab.label(m).label);
        }
    }
    for (std::size_t a = 0; a < vocab.attribute_count(); ++a) {
        const auto& name = vocab.attributes()[a].name;
        if (is_input[a]) {
            q.inputs.push_back(name);
            if (!constrained[a]) {
                q.vacuous.push_back(name);
            }
        } else if (projected[a]) {
            q.outputs.push_back(name);
        }
    }

    if (ast.alpha) {
        q.alpha = *ast.alpha;
    } else {
        if (clauses.empty()) {
            semantic_error("every condition lists all labels of its attribute; give alpha explicitly");
        }
        q.alpha = default_alpha(clauses, vocab);
        q.alpha_is_default = true;
    }
    q.proposition = std::move(clauses);
    return q;
}

NormalizedQuery compile_query(std::string_view text, const FuzzyFormalContext& ctx)
{
    return normalize(parse_query(text), ctx.vocabulary(), ctx.relation());
}

std::string describe_proposition(const NormalizedQuery& query, const LinguisticVocabulary& vocab)
{
    if (query.proposition.empty()) {
        return "TRUE";
    }
    auto cut = alpha_literal(query.alpha);
    std::vector<std::string> conjuncts;
    for (const auto& clause : query.proposition) {
        std::vector<std::string> literals;
        for (auto m : clause.labels) {
            literals.push_back(fmt::format("{}-cut({})", cut, vocab.label(m).str()));
        }
        conjuncts.push_back("(" + fmt::format("{}", fmt::join(literals, " OR ")) + ")");
    }
    return fmt::format("{}", fmt::join(conjuncts, " AND "));
}

}  // namespace fsq
