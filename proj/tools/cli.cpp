#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/chrono.h>
#include <fmt/format.h>
#include <fmt/ranges.h>
#include <json.hpp>

#include "fsq/clustering.hpp"
#include "fsq/context_io.hpp"
#include "fsq/engine.hpp"
#include "fsq/error.hpp"
#include "fsq/lattice.hpp"
#include "fsq/oracle.hpp"
#include "fsq/sqlf.hpp"

namespace fsq::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* manifest_file = "manifest.json";
constexpr const char* context_file = "context.json";
constexpr const char* lattice_file = "lattice.json";
constexpr const char* clustering_file = "clustering.json";

std::string now_utc()
{
    return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}",
                       fmt::gmtime(std::chrono::system_clock::to_time_t(std::chrono::system_clock::now())));
}

void write_file(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ValidationError(path.string(), "cannot write file");
    }
    out << text;
    if (!out) {
        throw ValidationError(path.string(), "write failed");
    }
}

json read_json_file(const fs::path& path)
{
    std::string text = read_text_file(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(path.string(), e.what());
    }
}

/// Paths are relative to the workspace directory.
struct Manifest {
    std::string relation;
    std::string context = context_file;
    std::optional<std::string> lattice;
    std::optional<std::string> clustering_config;
    double threshold = FuzzyFormalContext::default_threshold;
    std::string created;
    std::string updated;
};

json to_json(const Manifest& m)
{
    return {{"relation", m.relation},
            {"context", m.context},
            {"lattice", m.lattice ? json(*m.lattice) : json(nullptr)},
            {"clustering_config", m.clustering_config ? json(*m.clustering_config) : json(nullptr)},
            {"threshold", m.threshold},
            {"created", m.created},
            {"updated", m.updated}};
}

std::optional<std::string> optional_string(const json& doc, const char* key)
{
    if (!doc.contains(key) || doc[key].is_null()) {
        return std::nullopt;
    }
    if (!doc[key].is_string()) {
        throw ValidationError(fmt::format("{}.{}", manifest_file, key), "expected a string or null");
    }
    return doc[key].get<std::string>();
}

Manifest manifest_from_json(const json& doc)
{
    if (!doc.is_object()) {
        throw ValidationError(manifest_file, "expected an object");
    }
    Manifest m;
    try {
        m.relation = doc.at("relation").get<std::string>();
        m.context = doc.at("context").get<std::string>();
        m.threshold = doc.at("threshold").get<double>();
        m.created = doc.value("created", "");
        m.updated = doc.value("updated", "");
    } catch (const json::exception& e) {
        throw ValidationError(manifest_file, e.what());
    }
    m.lattice = optional_string(doc, "lattice");
    m.clustering_config = optional_string(doc, "clustering_config");
    return m;
}

class Workspace {
  public:
    explicit Workspace(fs::path dir) : dir_(std::move(dir)) {}

    const fs::path& dir() const { return dir_; }
    fs::path file(const std::string& name) const { return dir_ / name; }

    /// Reads the manifest and checks that the files it references exist.
    Manifest load_manifest() const
    {
        fs::path path = file(manifest_file);
        if (!fs::exists(path)) {
            throw ValidationError(dir_.string(), "not a workspace (no manifest.json); run ingest first");
        }
        Manifest m = manifest_from_json(read_json_file(path));
        for (const auto* ref : {&m.context, m.lattice ? &*m.lattice : nullptr,
                                m.clustering_config ? &*m.clustering_config : nullptr}) {
            if (ref && !fs::exists(file(*ref))) {
                throw ValidationError(file(manifest_file).string(), fmt::format("referenced file {} is missing", *ref));
            }
        }
        return m;
    }

    FuzzyFormalContext load_context(const Manifest& m) const
    {
        FuzzyFormalContext ctx = load_context_file(file(m.context));
        if (ctx.relation() != m.relation) {
            throw ValidationError(file(m.context).string(),
                                  fmt::format("relation '{}' does not match manifest '{}'", ctx.relation(), m.relation));
        }
        return ctx;
    }

    ConceptLattice load_lattice(const Manifest& m, const FuzzyFormalContext& ctx) const
    {
        if (!m.lattice) {
            throw ValidationError(dir_.string(), "workspace has no lattice; run build first");
        }
        fs::path path = file(*m.lattice);
        ConceptLattice lattice;
        try {
            lattice = lattice_from_json(read_json_file(path));
        } catch (const ValidationError& e) {
            throw ValidationError(path.string() + (e.location().empty() ? "" : ": " + e.location()), e.message());
        }
        check_compatible(ctx, lattice);
        if (lattice.threshold() != ctx.threshold()) {
            throw ValidationError(path.string(), "lattice threshold differs from the context threshold");
        }
        return lattice;
    }

    void save_manifest(Manifest m) const
    {
        m.updated = now_utc();
        if (m.created.empty()) {
            m.created = m.updated;
        }
        write_file(file(manifest_file), to_json(m).dump(2) + "\n");
    }

  private:
    fs::path dir_;
};

fs::path default_workspace()
{
    const char* env = std::getenv(workspace_env);
    return env && *env ? fs::path(env) : fs::path("fsq-workspace");
}

FuzzyFormalContext with_relation(const FuzzyFormalContext& ctx, std::string relation)
{
    std::vector<double> degrees;
    degrees.reserve(ctx.object_count() * ctx.label_count());
    for (std::size_t i = 0; i < ctx.object_count(); ++i) {
        auto row = ctx.row(i);
        degrees.insert(degrees.end(), row.begin(), row.end());
    }
    return FuzzyFormalContext(std::move(relation), ctx.vocabulary(), ctx.objects(), std::move(degrees),
                              ctx.threshold());
}

struct IngestOptions {
    std::string memberships;
    std::string raw;
    std::string cluster_config;
    std::optional<std::string> relation;
    std::optional<double> threshold;
};

struct BuildOptions {
    std::optional<double> threshold;
    std::string export_dot;
};

struct QueryOptions {
    std::string text;
    bool oracle = false;
    bool repl = false;
    std::string format = "text";
};

struct ExportOptions {
    std::string format = "structured";
    std::string output;
};

int cmd_ingest(const Workspace& ws, const IngestOptions& opt, Streams io)
{
    FuzzyFormalContext ctx;
    std::optional<json> plan_doc;
    if (!opt.memberships.empty()) {
        ctx = load_context_file(opt.memberships);
    } else {
        plan_doc = read_json_file(opt.cluster_config);
        ClusteringPlan plan;
        try {
            plan = clustering_plan_from_json(*plan_doc);
        } catch (const ValidationError& e) {
            throw ValidationError(opt.cluster_config + (e.location().empty() ? "" : ": " + e.location()), e.message());
        }
        NumericTable table;
        try {
            table = parse_numeric_table(read_text_file(opt.raw));
        } catch (const ValidationError& e) {
            throw ValidationError(opt.raw + (e.location().empty() ? "" : ": " + e.location()), e.message());
        }
        ctx = cluster_table(table, plan);
    }
    if (opt.relation) {
        ctx = with_relation(ctx, *opt.relation);
    }
    if (opt.threshold) {
        ctx = ctx.with_threshold(*opt.threshold);
    }

    fs::create_directories(ws.dir());
    Manifest m;
    if (fs::exists(ws.file(manifest_file))) {
        m.created = manifest_from_json(read_json_file(ws.file(manifest_file))).created;
    }
    m.relation = ctx.relation();
    m.threshold = ctx.threshold();
    write_file(ws.file(context_file), context_to_json(ctx).dump(2) + "\n");
    fs::remove(ws.file(lattice_file));
    fs::remove(ws.file(clustering_file));
    if (plan_doc) {
        write_file(ws.file(clustering_file), plan_doc->dump(2) + "\n");
        m.clustering_config = clustering_file;
    }
    ws.save_manifest(m);

    io.out << fmt::format("{} tuples, {} attributes, {} labels\n", ctx.object_count(),
                          ctx.vocabulary().attribute_count(), ctx.label_count());
    return exit_ok;
}

int cmd_build(const Workspace& ws, const BuildOptions& opt, Streams io)
{
    Manifest m = ws.load_manifest();
    FuzzyFormalContext ctx = ws.load_context(m);
    if (opt.threshold) {
        ctx = ctx.with_threshold(*opt.threshold);
    }
    ConceptLattice lattice = build_lattice(ctx);

    write_file(ws.file(m.context), context_to_json(ctx).dump(2) + "\n");
    write_file(ws.file(lattice_file), lattice_to_json(lattice).dump(2) + "\n");
    m.lattice = lattice_file;
    m.threshold = ctx.threshold();
    ws.save_manifest(m);

    if (!opt.export_dot.empty()) {
        std::ostringstream dot;
        write_dot(dot, lattice);
        write_file(opt.export_dot, dot.str());
    }
    io.out << fmt::format("{} concepts, {} edges (T={})\n", lattice.size(), lattice.edge_count(), ctx.threshold());
    return exit_ok;
}

std::string member_set(const std::vector<std::pair<std::string, double>>& members)
{
    std::vector<std::string> parts;
    for (const auto& [id, degree] : members) {
        parts.push_back(fmt::format("{}:{:g}", id, degree));
    }
    return fmt::format("{{{}}}", fmt::join(parts, ", "));
}

/// Union of the members of every returned summary, context order, with their satisfaction degree.
std::vector<std::pair<std::string, double>> engine_members(const ResultList& result)
{
    std::map<std::size_t, std::pair<std::string, double>> seen;
    for (const auto& s : result.summaries) {
        for (const auto& m : s.members) {
            seen.emplace(m.object, std::pair{m.id, m.satisfaction.value_or(m.concept_degree)});
        }
    }
    std::vector<std::pair<std::string, double>> out;
    for (auto& [object, entry] : seen) {
        out.push_back(std::move(entry));
    }
    return out;
}

void run_one_query(const FuzzyFormalContext& ctx, const ConceptLattice& lattice, std::string_view text,
                   const QueryOptions& opt, bool compact, Streams io)
{
    NormalizedQuery query = compile_query(text, ctx);
    ResultList result = fuzzy_k_query(ctx, lattice, query);
    std::optional<OracleAnswer> oracle;
    if (opt.oracle) {
        oracle = brute_force_answer(ctx, query);
    }

    if (opt.format == "json") {
        json doc = result_to_json(result);
        doc["proposition"] = describe_proposition(query, ctx.vocabulary());
        if (oracle) {
            json members = json::array();
            for (const auto& [id, degree] : oracle->members) {
                members.push_back({{"id", id}, {"satisfaction_degree", degree}});
            }
            doc["oracle"] = {{"alpha", oracle->alpha}, {"members", members}};
        }
        io.out << (compact ? doc.dump() : doc.dump(2)) << "\n";
        return;
    }

    io.out << fmt::format("proposition: {}\n", describe_proposition(query, ctx.vocabulary()));
    io.out << fmt::format("alpha={:g} k={} available={}\n", result.alpha,
                          result.k ? std::to_string(*result.k) : std::string("unlimited"), result.available);
    io.out << format_result_table(result);
    if (oracle) {
        auto all = engine_members(fuzzy_k_query(ctx, lattice, std::nullopt, query.alpha, query));
        auto same_ids = std::ranges::equal(all, oracle->members,
                                           [](const auto& a, const auto& b) { return a.first == b.first; });
        io.out << fmt::format("engine members (top k): {}\n", member_set(engine_members(result)));
        io.out << fmt::format("engine members (all pertinent): {}\n", member_set(all));
        io.out << fmt::format("oracle members: {}\n", member_set(oracle->members));
        io.out << fmt::format("member sets identical: {}\n", same_ids ? "yes" : "no");
    }
}

void report_query_error(const QueryError& e, Streams io)
{
    io.err << "query error: " << e.what() << "\n";
}

int cmd_query(const Workspace& ws, const QueryOptions& opt, Streams io)
{
    if (opt.text.empty() && !opt.repl) {
        throw ValidationError("query", "query text required (or use --repl)");
    }
    Manifest m = ws.load_manifest();
    FuzzyFormalContext ctx = ws.load_context(m);
    ConceptLattice lattice = ws.load_lattice(m, ctx);

    int status = exit_ok;
    if (!opt.text.empty()) {
        try {
            run_one_query(ctx, lattice, opt.text, opt, false, io);
        } catch (const QueryError& e) {
            report_query_error(e, io);
            status = exit_query_error;
        }
    }
    if (!opt.repl) {
        return status;
    }

    // A statement ends at a line whose last non-blank character is ';', or at end of input.
    std::string buffer;
    auto flush = [&] {
        if (buffer.find_first_not_of(" \t\r\n") == std::string::npos) {
            buffer.clear();
            return;
        }
        try {
            run_one_query(ctx, lattice, buffer, opt, true, io);
        } catch (const QueryError& e) {
            report_query_error(e, io);
            status = exit_query_error;
        }
        buffer.clear();
    };
    std::string line;
    while (true) {
        if (io.interactive) {
            io.out << (buffer.empty() ? "fsq> " : "...> ") << std::flush;
        }
        if (!std::getline(io.in, line)) {
            break;
        }
        buffer += line;
        buffer += '\n';
        auto last = line.find_last_not_of(" \t\r");
        if (last != std::string::npos && line[last] == ';') {
            flush();
        }
    }
    flush();
    if (io.interactive) {
        io.out << "\n";
    }
    return status;
}

int cmd_export(const Workspace& ws, const ExportOptions& opt, Streams io)
{
    Manifest m = ws.load_manifest();
    FuzzyFormalContext ctx = ws.load_context(m);
    ConceptLattice lattice = ws.load_lattice(m, ctx);

    std::ostringstream text;
    if (opt.format == "dot") {
        write_dot(text, lattice);
    } else {
        text << lattice_to_json(lattice).dump(2) << "\n";
    }
    if (opt.output.empty()) {
        io.out << text.str();
    } else {
        write_file(opt.output, text.str());
    }
    return exit_ok;
}

}  // namespace

int run(const std::vector<std::string>& args, Streams io)
{
    CLI::App app{"Fuzzy concept lattice summaries for flexible queries", args.empty() ? "fsq" : args.front()};
    app.require_subcommand(1);
    std::string workspace = default_workspace().string();
    app.add_option("-w,--workspace", workspace, fmt::format("Workspace directory (default: ${} or ./fsq-workspace)",
                                                            workspace_env));

    IngestOptions ingest;
    auto* ingest_cmd = app.add_subcommand("ingest", "Load a membership table, or cluster a numeric table");
    auto* memberships = ingest_cmd->add_option("--memberships", ingest.memberships,
                                               "Context document (structured or tabular)");
    auto* raw = ingest_cmd->add_option("--raw", ingest.raw, "Numeric table `id, attr, ...`");
    auto* cluster_config = ingest_cmd->add_option("--cluster-config", ingest.cluster_config,
                                                  "Clustering configuration document");
    ingest_cmd->add_option("--relation", ingest.relation, "Relation name override");
    ingest_cmd->add_option("--threshold", ingest.threshold, "Confidence threshold override")
        ->check(CLI::Range(0.0, 1.0));
    ingest_cmd->add_option("-w,--workspace", workspace, "Workspace directory");
    memberships->excludes(raw)->excludes(cluster_config);
    raw->needs(cluster_config);
    cluster_config->needs(raw);

    BuildOptions build;
    auto* build_cmd = app.add_subcommand("build", "Build the concept lattice of the workspace context");
    build_cmd->add_option("--threshold", build.threshold, "Confidence threshold (default: the context's)")
        ->check(CLI::Range(0.0, 1.0));
    build_cmd->add_option("--export-dot", build.export_dot, "Also write the lattice as Graphviz DOT");
    build_cmd->add_option("-w,--workspace", workspace, "Workspace directory");

    QueryOptions query;
    auto* query_cmd = app.add_subcommand("query", "Evaluate a SQLf query against the lattice");
    query_cmd->add_option("text", query.text, "Query text");
    query_cmd->add_flag("--oracle", query.oracle, "Also print the brute-force answer");
    query_cmd->add_flag("--repl", query.repl, "Read queries from standard input until end of input");
    query_cmd->add_option("--format", query.format, "Output format")->check(CLI::IsMember({"text", "json"}));
    query_cmd->add_option("-w,--workspace", workspace, "Workspace directory");

    ExportOptions exp;
    auto* export_cmd = app.add_subcommand("export", "Write the lattice as a structured document or DOT");
    export_cmd->add_option("--format", exp.format, "structured or dot")
        ->check(CLI::IsMember({"structured", "dot"}));
    export_cmd->add_option("-o,--output", exp.output, "Output file (default: standard output)");
    export_cmd->add_option("-w,--workspace", workspace, "Workspace directory");

    try {
        std::vector<std::string> rest(args.rbegin(), args.rend());
        if (!rest.empty()) {
            rest.pop_back();
        }
        app.parse(rest);
        if (ingest_cmd->parsed() && ingest.memberships.empty() && ingest.raw.empty()) {
            throw CLI::RequiredError("--memberships or --raw with --cluster-config");
        }
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, io.out, io.err);
        return code == 0 ? exit_ok : exit_input_error;
    }

    Workspace ws{workspace};
    try {
        if (ingest_cmd->parsed()) {
            return cmd_ingest(ws, ingest, io);
        }
        if (build_cmd->parsed()) {
            return cmd_build(ws, build, io);
        }
        if (query_cmd->parsed()) {
            return cmd_query(ws, query, io);
        }
        return cmd_export(ws, exp, io);
    } catch (const QueryError& e) {
        report_query_error(e, io);
        return exit_query_error;
    } catch (const Error& e) {
        io.err << "error: " << e.what() << "\n";
        return exit_input_error;
    } catch (const fs::filesystem_error& e) {
        io.err << "error: " << e.what() << "\n";
        return exit_input_error;
    } catch (const json::exception& e) {
        io.err << "error: " << e.what() << "\n";
        return exit_input_error;
    }
}

}  // namespace fsq::cli
