#include "vms/harness.hpp"

#include <algorithm>
#include <array>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace vms {

ConfigParseError::ConfigParseError(int line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

ConfigValidationError::ConfigValidationError(const std::string& field, const std::string& what)
    : std::runtime_error("invalid '" + field + "': " + what), field_(field) {}

namespace {

// ---- enum spellings -------------------------------------------------------

template <class E>
struct Spelling {
    E value;
    const char* text;
};

constexpr std::array<Spelling<ProblemKind>, 3> kind_names{{
    {ProblemKind::stationary, "stationary-adr"},
    {ProblemKind::evolutive, "evolutive-ad"},
    {ProblemKind::tau_table, "tau-table"},
}};
constexpr std::array<Spelling<StudyKind>, 2> study_names{{
    {StudyKind::solution, "solution"},
    {StudyKind::convergence, "convergence"},
}};
constexpr std::array<Spelling<ReferencePolicy>, 5> reference_names{{
    {ReferencePolicy::none, "none"},
    {ReferencePolicy::exact, "exact"},
    {ReferencePolicy::exact_rothe, "exact-rothe"},
    {ReferencePolicy::fine_galerkin, "fine-galerkin"},
    {ReferencePolicy::converged_spectral, "converged-spectral"},
}};
constexpr std::array<Spelling<SweepKind>, 4> sweep_names{{
    {SweepKind::none, "none"},
    {SweepKind::h, "h"},
    {SweepKind::k, "k"},
    {SweepKind::M, "M"},
}};
constexpr std::array<Spelling<InitialKind>, 3> initial_names{{
    {InitialKind::box, "box"},
    {InitialKind::eigenmode, "eigenmode"},
    {InitialKind::zero, "zero"},
}};
constexpr std::array<Spelling<Comparison>, 2> comparison_names{{
    {Comparison::fine, "fine"},
    {Comparison::nodal, "nodal"},
}};

template <class E, std::size_t N>
std::string spell(const std::array<Spelling<E>, N>& table, E v) {
    for (const auto& s : table) {
        if (s.value == v) return s.text;
    }
    throw std::logic_error("unspellable enum value");
}

template <class E, std::size_t N>
std::optional<E> lookup(const std::array<Spelling<E>, N>& table, const std::string& text) {
    for (const auto& s : table) {
        if (text == s.text) return s.value;
    }
    return std::nullopt;
}

template <class E, std::size_t N>
std::string choices(const std::array<Spelling<E>, N>& table) {
    std::string r;
    for (const auto& s : table) r += (r.empty() ? "" : " | ") + std::string(s.text);
    return r;
}

// ---- text helpers ---------------------------------------------------------

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, ',')) {
        cur = trim(cur);
        if (!cur.empty()) out.push_back(cur);
    }
    return out;
}

std::optional<double> to_double(const std::string& s) {
    if (s.empty()) return std::nullopt;
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE) return std::nullopt;
    return v;
}

std::optional<int> to_int(const std::string& s) {
    if (s.empty()) return std::nullopt;
    char* end = nullptr;
    errno = 0;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (end != s.c_str() + s.size() || errno == ERANGE || v < -1000000000L || v > 1000000000L) return std::nullopt;
    return static_cast<int>(v);
}

std::string canonical(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string join(const std::vector<std::string>& v) {
    std::string r;
    for (const auto& s : v) r += (r.empty() ? "" : ", ") + s;
    return r;
}

std::string join_numbers(const std::vector<double>& v) {
    std::vector<std::string> s;
    for (double d : v) s.push_back(canonical(d));
    return join(s);
}

bool valid_name(const std::string& n) {
    if (n.empty()) return false;
    return std::all_of(n.begin(), n.end(), [](char ch) {
        return std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_' || ch == '.';
    });
}

// Keys accepted for each problem kind, in canonical order.
const std::vector<std::string>& keys_for(ProblemKind kind) {
    static const std::vector<std::string> stationary = {
        "study", "gamma", "c", "mu", "n_elements", "mode", "source_constant", "source_slope", "left", "right",
        "reference", "comparison", "sweep", "sweep_values"};
    static const std::vector<std::string> evolutive = {
        "study", "c", "mu", "n_elements", "k", "T", "steps", "cfl_ratio", "mode", "source_constant",
        "source_slope", "initial", "reference", "reference_m", "comparison", "sweep", "sweep_values"};
    static const std::vector<std::string> tau = {"c", "mu", "n_elements", "k", "peclet_values", "sweep_values",
                                                 "asymptotic_k"};
    switch (kind) {
    case ProblemKind::stationary: return stationary;
    case ProblemKind::evolutive: return evolutive;
    case ProblemKind::tau_table: return tau;
    }
    throw std::logic_error("unknown kind");
}

std::string value_of(const RunConfig& c, const std::string& key) {
    if (key == "study") return spell(study_names, c.study);
    if (key == "gamma") return canonical(c.gamma);
    if (key == "c") return canonical(c.c);
    if (key == "mu") return canonical(c.mu);
    if (key == "n_elements") return std::to_string(c.n_elements);
    if (key == "k") return canonical(c.k);
    if (key == "T") return canonical(c.T);
    if (key == "steps") return std::to_string(c.steps);
    if (key == "cfl_ratio") return canonical(c.cfl_ratio);
    if (key == "mode") return join(c.modes);
    if (key == "source_constant") return canonical(c.source_constant);
    if (key == "source_slope") return canonical(c.source_slope);
    if (key == "left") return canonical(c.left);
    if (key == "right") return canonical(c.right);
    if (key == "initial") return spell(initial_names, c.initial);
    if (key == "reference") return spell(reference_names, c.reference);
    if (key == "reference_m") return std::to_string(c.reference_m);
    if (key == "comparison") {
        std::vector<std::string> s;
        for (auto cmp : c.comparisons) s.push_back(spell(comparison_names, cmp));
        return join(s);
    }
    if (key == "sweep") return spell(sweep_names, c.sweep);
    if (key == "sweep_values") return join_numbers(c.sweep_values);
    if (key == "peclet_values") return join_numbers(c.peclet_values);
    if (key == "asymptotic_k") return join_numbers(c.asymptotic_k);
    throw std::logic_error("no such key " + key);
}

void assign(RunConfig& c, const std::string& key, const std::string& value, int line) {
    auto number = [&]() {
        auto v = to_double(value);
        if (!v) throw ConfigParseError(line, "'" + key + "' expects a number, got '" + value + "'");
        return *v;
    };
    auto integer = [&]() {
        auto v = to_int(value);
        if (!v) throw ConfigParseError(line, "'" + key + "' expects an integer, got '" + value + "'");
        return *v;
    };
    auto numbers = [&]() {
        std::vector<double> out;
        for (const auto& t : split_list(value)) {
            auto v = to_double(t);
            if (!v) throw ConfigParseError(line, "'" + key + "' expects a list of numbers, got '" + t + "'");
            out.push_back(*v);
        }
        return out;
    };
    auto enumerated = [&](const auto& table) {
        auto v = lookup(table, value);
        if (!v) throw ConfigParseError(line, "'" + key + "' must be one of " + choices(table) + ", got '" + value + "'");
        return *v;
    };

    if (key == "study") c.study = enumerated(study_names);
    else if (key == "gamma") c.gamma = number();
    else if (key == "c") c.c = number();
    else if (key == "mu") c.mu = number();
    else if (key == "n_elements") c.n_elements = integer();
    else if (key == "k") c.k = number();
    else if (key == "T") c.T = number();
    else if (key == "steps") c.steps = integer();
    else if (key == "cfl_ratio") c.cfl_ratio = number();
    else if (key == "mode") c.modes = split_list(value);
    else if (key == "source_constant") c.source_constant = number();
    else if (key == "source_slope") c.source_slope = number();
    else if (key == "left") c.left = number();
    else if (key == "right") c.right = number();
    else if (key == "initial") c.initial = enumerated(initial_names);
    else if (key == "reference") c.reference = enumerated(reference_names);
    else if (key == "reference_m") c.reference_m = integer();
    else if (key == "comparison") {
        c.comparisons.clear();
        for (const auto& t : split_list(value)) {
            auto v = lookup(comparison_names, t);
            if (!v) throw ConfigParseError(line, "'comparison' entries must be fine or nodal, got '" + t + "'");
            c.comparisons.push_back(*v);
        }
    } else if (key == "sweep") c.sweep = enumerated(sweep_names);
    else if (key == "sweep_values") c.sweep_values = numbers();
    else if (key == "peclet_values") c.peclet_values = numbers();
    else if (key == "asymptotic_k") c.asymptotic_k = numbers();
    else throw ConfigParseError(line, "unknown key '" + key + "'");
}

struct Entry {
    std::string value;
    int line;
};

struct Section {
    std::string name;
    int line = 0;
    std::vector<std::pair<std::string, Entry>> entries;
};

RunConfig build(const Section& s) {
    RunConfig c;
    if (!s.name.empty()) c.name = s.name;
    std::set<std::string> seen;
    const Entry* kind = nullptr;
    for (const auto& [key, e] : s.entries) {
        if (!seen.insert(key).second) throw ConfigParseError(e.line, "duplicate key '" + key + "'");
        if (key == "kind") kind = &e;
    }
    if (!kind) throw ConfigValidationError("kind", "missing (one of " + choices(kind_names) + ")");
    auto k = lookup(kind_names, kind->value);
    if (!k) {
        throw ConfigParseError(kind->line, "'kind' must be one of " + choices(kind_names) + ", got '" + kind->value + "'");
    }
    c.kind = *k;
    const auto& allowed = keys_for(c.kind);
    for (const auto& [key, e] : s.entries) {
        if (key == "kind") continue;
        if (key == "name") {
            c.name = e.value;
            continue;
        }
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            static const std::set<std::string> known = {
                "study", "gamma", "c", "mu", "n_elements", "k", "T", "steps", "cfl_ratio", "mode",
                "source_constant", "source_slope", "left", "right", "initial", "reference", "reference_m",
                "comparison", "sweep", "sweep_values", "peclet_values", "asymptotic_k"};
            if (!known.count(key)) throw ConfigParseError(e.line, "unknown key '" + key + "'");
            throw ConfigValidationError(key, "does not apply to kind " + kind->value);
        }
        assign(c, key, e.value, e.line);
    }
    c.validate();
    return c;
}

}  // namespace

// ---- modes ----------------------------------------------------------------

SolverMode parse_mode(const std::string& token, std::optional<int> sweep_m) {
    if (token == "galerkin") return Galerkin{};
    const auto colon = token.find(':');
    const std::string head = token.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : token.substr(colon + 1);
    if (head == "spectral-vms") {
        if (arg.empty()) {
            if (!sweep_m) throw ConfigValidationError("mode", "spectral-vms needs ':M' outside an M sweep");
            return SpectralVMS{*sweep_m};
        }
        auto m = to_int(arg);
        if (!m || *m < 1) throw ConfigValidationError("mode", "spectral-vms needs M >= 1, got '" + arg + "'");
        return SpectralVMS{*m};
    }
    if (head == "tau-vms") {
        if (arg == "exact") return TauVMS{};
        if (arg.empty()) {
            if (!sweep_m) throw ConfigValidationError("mode", "tau-vms needs ':M' or ':exact'");
            return TauVMS{*sweep_m};
        }
        auto m = to_int(arg);
        if (!m || *m < 1) throw ConfigValidationError("mode", "tau-vms needs M >= 1 or 'exact', got '" + arg + "'");
        return TauVMS{*m};
    }
    throw ConfigValidationError("mode", "unknown mode '" + token + "'");
}

// ---- validation -----------------------------------------------------------

namespace {

void require(bool ok, const std::string& field, const std::string& what) {
    if (!ok) throw ConfigValidationError(field, what);
}

void check_sweep_values(const RunConfig& c) {
    const auto& v = c.sweep_values;
    require(v.size() >= 3, "sweep_values", "at least 3 values are required");
    bool inc = true, dec = true;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        inc = inc && v[i + 1] > v[i];
        dec = dec && v[i + 1] < v[i];
    }
    require(inc || dec, "sweep_values", "values must be strictly monotone");
    for (double x : v) {
        require(x > 0.0 && std::isfinite(x), "sweep_values", "values must be positive");
        if (c.sweep == SweepKind::h || c.sweep == SweepKind::M) {
            require(x == std::floor(x), "sweep_values", "values must be integers for this sweep");
        }
        if (c.sweep == SweepKind::h) require(x >= 2, "sweep_values", "element counts must be >= 2");
    }
}

}  // namespace

void RunConfig::validate() const {
    require(valid_name(name), "name", "must be nonempty and use only letters, digits, '-', '_' or '.'");
    require(mu > 0.0 && std::isfinite(mu), "mu", "must be positive");
    require(std::isfinite(c), "c", "must be finite");

    if (kind == ProblemKind::tau_table) {
        require(k > 0.0, "k", "must be positive");
        require(n_elements >= 2, "n_elements", "must be >= 2");
        require(!peclet_values.empty(), "peclet_values", "at least one value is required");
        for (double p : peclet_values) require(p >= 0.0 && std::isfinite(p), "peclet_values", "must be nonnegative");
        require(sweep_values.size() >= 3, "sweep_values", "at least 3 mode counts are required");
        for (std::size_t i = 0; i < sweep_values.size(); ++i) {
            const double m = sweep_values[i];
            require(m >= 1 && m == std::floor(m), "sweep_values", "mode counts must be integers >= 1");
            if (i > 0) require(m > sweep_values[i - 1], "sweep_values", "mode counts must increase");
        }
        require(asymptotic_k.empty() || asymptotic_k.size() >= 3, "asymptotic_k", "needs at least 3 values");
        for (double x : asymptotic_k) require(x > 0.0, "asymptotic_k", "values must be positive");
        return;
    }

    require(!modes.empty(), "mode", "at least one mode is required");
    const std::optional<int> probe = sweep == SweepKind::M ? std::optional<int>(1) : std::nullopt;
    for (const auto& m : modes) {
        const SolverMode parsed = parse_mode(m, probe);
        if (kind == ProblemKind::stationary) {
            require(!std::holds_alternative<TauVMS>(parsed), "mode", "tau-vms applies only to evolutive-ad");
        }
    }
    if (sweep != SweepKind::h) require(n_elements >= 2, "n_elements", "must be >= 2");

    if (study == StudyKind::solution) {
        require(sweep == SweepKind::none, "sweep", "must be none for a solution study");
        require(sweep_values.empty(), "sweep_values", "must be empty for a solution study");
    } else {
        require(sweep != SweepKind::none, "sweep", "a convergence study needs a sweep");
        require(modes.size() == 1, "mode", "a convergence study takes exactly one mode");
        require(reference != ReferencePolicy::none, "reference", "a convergence study needs a reference");
        require(!comparisons.empty(), "comparison", "at least one comparison is required");
        check_sweep_values(*this);
    }

    if (kind == ProblemKind::stationary) {
        require(gamma >= 0.0 && std::isfinite(gamma), "gamma", "must be nonnegative");
        require(sweep != SweepKind::k, "sweep", "k sweeps apply only to evolutive-ad");
        require(reference == ReferencePolicy::none || reference == ReferencePolicy::exact ||
                    reference == ReferencePolicy::fine_galerkin,
                "reference", "stationary-adr accepts none | exact | fine-galerkin");
        if (reference == ReferencePolicy::exact) {
            require(source_constant == 0.0 && source_slope == 0.0, "reference",
                    "the exact solution assumes a zero source");
            require(left == 0.0 && right == 1.0, "reference", "the exact solution assumes U(0)=0, U(1)=1");
        }
        return;
    }

    // evolutive
    if (sweep == SweepKind::k) {
        require(k == 0.0, "k", "a k sweep takes its steps from sweep_values");
    } else {
        require(k > 0.0 || cfl_ratio > 0.0, "k", "must be positive (or set cfl_ratio)");
    }
    require(!(k > 0.0 && cfl_ratio > 0.0), "cfl_ratio", "give either k or cfl_ratio, not both");
    require(cfl_ratio >= 0.0, "cfl_ratio", "must be nonnegative");
    require(steps >= 0, "steps", "must be nonnegative");
    require(!(steps > 0 && T > 0.0), "T", "give either T or steps, not both");
    require(steps > 0 || T > 0.0, "T", "must be positive (or set steps)");
    if (cfl_ratio > 0.0) {
        require(sweep != SweepKind::k && sweep != SweepKind::h, "cfl_ratio", "cannot be combined with an h or k sweep");
        require(c != 0.0, "cfl_ratio", "needs a nonzero velocity");
        const auto q = cfl_quantities(c, mu, 1.0 / n_elements, 1.0);
        require(q.bound_applicable, "cfl_ratio", "the CFL bound needs element Peclet h|c|/(2 mu) < 1");
    }
    require(sweep != SweepKind::k || steps == 0, "steps", "a k sweep needs a fixed T");
    if (reference == ReferencePolicy::exact || reference == ReferencePolicy::exact_rothe) {
        require(initial == InitialKind::eigenmode, "reference", "exact references need initial = eigenmode");
        require(source_constant == 0.0 && source_slope == 0.0, "reference", "exact references need a zero source");
    }
    if (reference == ReferencePolicy::converged_spectral) {
        require(reference_m >= 1, "reference_m", "must be >= 1 for a converged-spectral reference");
        for (auto cmp : comparisons) {
            require(cmp == Comparison::nodal, "comparison", "a converged-spectral reference supports nodal only");
        }
    }
    if (sweep != SweepKind::k) {
        const double kk = time_step();
        const double TT = final_time();
        require(TT >= kk, "T", "must be at least k");
        require(std::abs(std::round(TT / kk) * kk - TT) <= 1e-12, "T", "must be an integer multiple of k");
    } else {
        for (double kk : sweep_values) {
            require(T >= kk && std::abs(std::round(T / kk) * kk - T) <= 1e-12, "sweep_values",
                    "every k must divide T");
        }
    }
}

double RunConfig::time_step() const {
    if (cfl_ratio > 0.0) {
        const double h = 1.0 / n_elements;
        const auto q = cfl_quantities(c, mu, h, 1.0);
        return cfl_ratio * q.cfl_bound * h / std::abs(c);
    }
    return k;
}

double RunConfig::final_time() const { return steps > 0 ? steps * time_step() : T; }

StationaryProblem RunConfig::stationary_problem() const {
    StationaryProblem p;
    p.gamma = gamma;
    p.c = c;
    p.mu = mu;
    p.source = {source_constant, source_slope};
    p.left = left;
    p.right = right;
    return p;
}

EvolutiveProblem RunConfig::evolutive_problem(double k_override) const {
    EvolutiveProblem p;
    p.c = c;
    p.mu = mu;
    p.k = k_override > 0.0 ? k_override : time_step();
    p.T = final_time();
    p.source = {source_constant, source_slope};
    p.initial.kind = initial;
    return p;
}

// ---- serialization --------------------------------------------------------

std::string serialize(const RunConfig& c) {
    std::ostringstream os;
    os << "[" << c.name << "]\n";
    os << "kind = " << spell(kind_names, c.kind) << "\n";
    for (const auto& key : keys_for(c.kind)) os << key << " = " << value_of(c, key) << "\n";
    return os.str();
}

std::string serialize(const std::vector<RunConfig>& configs) {
    std::string out;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        if (i > 0) out += "\n";
        out += serialize(configs[i]);
    }
    return out;
}

std::vector<RunConfig> parse_config(const std::string& text) {
    std::vector<Section> sections;
    std::istringstream is(text);
    std::string raw;
    int line = 0;
    while (std::getline(is, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ConfigParseError(line, "unterminated section header");
            const std::string name = trim(s.substr(1, s.size() - 2));
            if (!valid_name(name)) throw ConfigParseError(line, "invalid section name '" + name + "'");
            for (const auto& sec : sections) {
                if (sec.name == name) throw ConfigParseError(line, "duplicate section '" + name + "'");
            }
            sections.push_back({name, line, {}});
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigParseError(line, "expected 'key = value'");
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (key.empty()) throw ConfigParseError(line, "missing key before '='");
        if (sections.empty()) sections.push_back({"", line, {}});
        sections.back().entries.push_back({key, {value, line}});
    }
    if (sections.empty()) throw ConfigParseError(line, "config is empty");
    std::vector<RunConfig> out;
    for (const auto& sec : sections) out.push_back(build(sec));
    for (std::size_t i = 0; i < out.size(); ++i) {
        for (std::size_t j = i + 1; j < out.size(); ++j) {
            if (out[i].name == out[j].name) throw ConfigValidationError("name", "duplicate run name '" + out[i].name + "'");
        }
    }
    return out;
}

std::vector<RunConfig> load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigValidationError("path", "cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

// ---- presets --------------------------------------------------------------

namespace {

std::vector<double> odd_range(int a, int b) {
    std::vector<double> v;
    for (int m = a; m <= b; m += 2) v.push_back(m);
    return v;
}

RunConfig stationary_figure(const std::string& name, double gamma, double c) {
    RunConfig r;
    r.name = name;
    r.kind = ProblemKind::stationary;
    r.gamma = gamma;
    r.c = c;
    r.mu = 1.0;
    r.n_elements = 40;
    r.modes = {"galerkin", "spectral-vms:2", "spectral-vms:3", "spectral-vms:14", "spectral-vms:15"};
    r.reference = ReferencePolicy::exact;
    return r;
}

RunConfig stationary_m_sweep(const std::string& name, double gamma, double c) {
    RunConfig r;
    r.name = name;
    r.kind = ProblemKind::stationary;
    r.study = StudyKind::convergence;
    r.gamma = gamma;
    r.c = c;
    r.mu = 1.0;
    r.n_elements = 40;
    r.modes = {"spectral-vms"};
    r.reference = ReferencePolicy::exact;
    r.comparisons = {Comparison::nodal};
    r.sweep = SweepKind::M;
    r.sweep_values = odd_range(3, 41);
    return r;
}

const std::map<std::string, std::function<std::vector<RunConfig>()>>& catalog() {
    static const std::map<std::string, std::function<std::vector<RunConfig>()>> presets = {
        {"fig-rcd1a", [] { return std::vector<RunConfig>{stationary_figure("fig-rcd1a", 1.0, 400.0)}; }},
        {"fig-rcd1b", [] { return std::vector<RunConfig>{stationary_figure("fig-rcd1b", 1000.0, 1.0)}; }},
        {"fig-ev1",
         [] {
             RunConfig r;
             r.name = "fig-ev1";
             r.kind = ProblemKind::evolutive;
             r.c = 1000.0;
             r.mu = 1.0;
             r.n_elements = 50;
             r.k = 1e-3;
             r.steps = 5;
             r.modes = {"galerkin", "spectral-vms:14", "spectral-vms:15"};
             r.initial = InitialKind::box;
             return std::vector<RunConfig>{r};
         }},
        {"fig-ev1step",
         [] {
             RunConfig r;
             r.name = "fig-ev1step";
             r.kind = ProblemKind::evolutive;
             r.c = 400.0;
             r.mu = 1.0;
             r.n_elements = 50;
             r.k = 1e-5;
             r.steps = 1;
             r.modes = {"galerkin", "spectral-vms:5"};
             r.initial = InitialKind::box;
             r.reference = ReferencePolicy::fine_galerkin;
             return std::vector<RunConfig>{r};
         }},
        {"fig-hauke",
         [] {
             RunConfig r;
             r.name = "fig-hauke";
             r.kind = ProblemKind::evolutive;
             r.c = 20.0;
             r.mu = 1.0;
             r.n_elements = 100;
             r.cfl_ratio = 0.5;
             r.steps = 5;
             r.modes = {"galerkin", "spectral-vms:11"};
             r.initial = InitialKind::box;
             return std::vector<RunConfig>{r};
         }},
        {"conv-h-stationary",
         [] {
             RunConfig r;
             r.name = "conv-h-stationary";
             r.kind = ProblemKind::stationary;
             r.study = StudyKind::convergence;
             r.gamma = 1.0;
             r.c = 1.0;
             r.mu = 1.0;
             r.modes = {"spectral-vms:10"};
             r.reference = ReferencePolicy::exact;
             r.comparisons = {Comparison::fine, Comparison::nodal};
             r.sweep = SweepKind::h;
             r.sweep_values = {10, 20, 40, 80, 160};
             return std::vector<RunConfig>{r};
         }},
        {"conv-m-stationary",
         [] {
             return std::vector<RunConfig>{stationary_m_sweep("conv-m-stationary-advective", 1.0, 400.0),
                                           stationary_m_sweep("conv-m-stationary-reactive", 1000.0, 1.0)};
         }},
        {"conv-h-evolutive",
         [] {
             RunConfig r;
             r.name = "conv-h-evolutive";
             r.kind = ProblemKind::evolutive;
             r.study = StudyKind::convergence;
             r.c = 1.0;
             r.mu = 1.0;
             r.k = 0.01;
             r.T = 0.5;
             r.modes = {"spectral-vms:10"};
             r.initial = InitialKind::eigenmode;
             r.reference = ReferencePolicy::exact_rothe;
             r.comparisons = {Comparison::fine, Comparison::nodal};
             r.sweep = SweepKind::h;
             r.sweep_values = {10, 20, 40, 80, 160};
             return std::vector<RunConfig>{r};
         }},
        {"conv-k-evolutive",
         [] {
             RunConfig r;
             r.name = "conv-k-evolutive";
             r.kind = ProblemKind::evolutive;
             r.study = StudyKind::convergence;
             r.c = 1.0;
             r.mu = 1.0;
             r.n_elements = 100;
             r.T = 0.8;
             r.modes = {"spectral-vms:10"};
             r.initial = InitialKind::eigenmode;
             r.reference = ReferencePolicy::exact;
             r.comparisons = {Comparison::nodal};
             r.sweep = SweepKind::k;
             for (int i = 0; i <= 5; ++i) r.sweep_values.push_back(0.1 / (1 << i));
             return std::vector<RunConfig>{r};
         }},
        {"conv-m-evolutive",
         [] {
             RunConfig r;
             r.name = "conv-m-evolutive";
             r.kind = ProblemKind::evolutive;
             r.study = StudyKind::convergence;
             r.c = 1000.0;
             r.mu = 1.0;
             r.n_elements = 100;
             r.k = 0.05;
             r.T = 1.0;
             r.modes = {"spectral-vms"};
             r.initial = InitialKind::box;
             r.reference = ReferencePolicy::converged_spectral;
             r.reference_m = 1001;
             r.comparisons = {Comparison::nodal};
             r.sweep = SweepKind::M;
             r.sweep_values = odd_range(3, 41);
             return std::vector<RunConfig>{r};
         }},
        {"tau-table",
         [] {
             RunConfig r;
             r.name = "tau-table";
             r.kind = ProblemKind::tau_table;
             r.c = 1.0;
             r.mu = 1.0;
             r.n_elements = 100;
             r.k = 1e-3;
             r.peclet_values = {0.1, 1.0, 10.0};
             r.sweep_values = odd_range(3, 41);
             r.asymptotic_k = {1e-2, 1e-3, 1e-4, 1e-5};
             return std::vector<RunConfig>{r};
         }},
    };
    return presets;
}

}  // namespace

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const auto& [n, f] : catalog()) names.push_back(n);
    return names;
}

std::vector<RunConfig> preset_configs(const std::string& name) {
    const auto it = catalog().find(name);
    if (it == catalog().end()) throw UnknownPreset(name);
    auto configs = it->second();
    for (const auto& c : configs) c.validate();
    return configs;
}

// ---- CSV ------------------------------------------------------------------

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

std::string CsvArtifact::render() const {
    std::string out;
    for (const auto& p : provenance) out += "# " + p + "\n";
    for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
    out += "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + row[i];
        out += "\n";
    }
    return out;
}

void CsvArtifact::write(const std::string& dir) const {
    std::filesystem::create_directories(dir);
    const auto path = std::filesystem::path(dir) / filename;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << render();
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

CsvTable parse_csv(const std::string& text) {
    CsvTable t;
    std::istringstream is(text);
    std::string line;
    bool have_header = false;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty() && line.front() == '#') {
            t.comments.push_back(line.substr(line.rfind("# ", 0) == 0 ? 2 : 1));
            continue;
        }
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        if (!have_header) {
            t.header = std::move(cells);
            have_header = true;
        } else {
            t.rows.push_back(std::move(cells));
        }
    }
    return t;
}

std::vector<double> CsvTable::column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::out_of_range("no column " + name);
    const std::size_t i = static_cast<std::size_t>(it - header.begin());
    std::vector<double> v;
    for (const auto& r : rows) v.push_back(std::strtod(r.at(i).c_str(), nullptr));
    return v;
}

// ---- execution ------------------------------------------------------------

const CurveData& SolutionData::curve(const std::string& label) const {
    for (const auto& c : curves) {
        if (c.label == label) return c;
    }
    throw std::out_of_range("no curve " + label);
}

const ConvergenceStudy& ConvergenceData::study(Comparison c) const {
    for (std::size_t i = 0; i < comparisons.size(); ++i) {
        if (comparisons[i] == c) return studies.at(i);
    }
    throw std::out_of_range("no study for comparison " + to_string(c));
}

namespace {

std::vector<std::string> provenance(const RunConfig& c) {
    std::vector<std::string> p;
    p.push_back(std::string("vms-spectral ") + library_version);
    p.push_back("run: " + c.name);
    p.push_back("config:");
    std::istringstream is(serialize(c));
    std::string line;
    while (std::getline(is, line)) p.push_back("  " + line);
    return p;
}

SolutionTrajectory stationary_trajectory(const std::vector<double>& u, int n, const std::string& mode) {
    SolutionTrajectory t;
    t.times = {0.0};
    t.fields = {u};
    t.metadata.mode = mode;
    t.metadata.n_elements = n;
    return t;
}

std::vector<double> sample_coarse(const std::vector<double>& fine, int factor) {
    std::vector<double> v;
    for (std::size_t i = 0; i < fine.size(); i += factor) v.push_back(fine[i]);
    return v;
}

OvershootBounds stationary_bounds(const RunConfig& c) {
    return {std::min(c.left, c.right), std::max(c.left, c.right), std::abs(c.right - c.left)};
}

double nodal_max_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

RunResult run_solution(const RunConfig& cfg) {
    RunResult res;
    res.config = cfg;
    SolutionData sd;
    const Mesh1D mesh(cfg.n_elements);
    sd.x = mesh.nodes();
    std::optional<std::vector<std::vector<double>>> ref_levels;
    OvershootBounds bounds;

    if (cfg.kind == ProblemKind::stationary) {
        const StationaryProblem p = cfg.stationary_problem();
        sd.times = {0.0};
        bounds = stationary_bounds(cfg);
        if (cfg.reference == ReferencePolicy::exact) {
            std::vector<double> e(mesh.n_nodes());
            for (int i = 0; i < mesh.n_nodes(); ++i) e[i] = exact_stationary(mesh.node(i), cfg.gamma, cfg.c, cfg.mu);
            ref_levels = {{e}};
        } else if (cfg.reference == ReferencePolicy::fine_galerkin) {
            const Mesh1D fine(cfg.n_elements * fine_refinement);
            ref_levels = {{sample_coarse(solve_stationary(p, fine, Galerkin{}), fine_refinement)}};
        }
        for (const auto& m : cfg.modes) {
            CurveData cd;
            cd.label = m;
            cd.levels = {solve_stationary(p, mesh, parse_mode(m))};
            if (cfg.reference == ReferencePolicy::exact) {
                cd.dense_max_error = dense_max_error(
                    cd.levels[0], [&](double x) { return exact_stationary(x, cfg.gamma, cfg.c, cfg.mu); });
            }
            sd.curves.push_back(std::move(cd));
        }
    } else {
        const EvolutiveProblem p = cfg.evolutive_problem();
        const int N = p.steps();
        for (int n = 0; n <= N; ++n) sd.times.push_back(n * p.k);
        bounds = OvershootBounds::of(initial_nodal_field(p, mesh));
        switch (cfg.reference) {
        case ReferencePolicy::none: break;
        case ReferencePolicy::exact:
        case ReferencePolicy::exact_rothe: {
            std::vector<std::vector<double>> lv;
            for (int n = 0; n <= N; ++n) {
                std::vector<double> e(mesh.n_nodes());
                for (int i = 0; i < mesh.n_nodes(); ++i) {
                    e[i] = cfg.reference == ReferencePolicy::exact
                               ? exact_evolutive_mode(mesh.node(i), n * p.k, p.c, p.mu)
                               : exact_evolutive_mode_rothe(mesh.node(i), n, p.k, p.c, p.mu);
                }
                lv.push_back(std::move(e));
            }
            ref_levels = std::move(lv);
            break;
        }
        case ReferencePolicy::fine_galerkin: {
            const Mesh1D fine(cfg.n_elements * fine_refinement);
            const auto t = solve_evolutive(p, fine, Galerkin{});
            std::vector<std::vector<double>> lv;
            for (const auto& f : t.fields) lv.push_back(sample_coarse(f, fine_refinement));
            ref_levels = std::move(lv);
            break;
        }
        case ReferencePolicy::converged_spectral:
            ref_levels = solve_evolutive(p, mesh, SpectralVMS{cfg.reference_m}).fields;
            break;
        }
        for (const auto& m : cfg.modes) {
            CurveData cd;
            cd.label = m;
            cd.levels = solve_evolutive(p, mesh, parse_mode(m)).fields;
            sd.curves.push_back(std::move(cd));
        }
    }

    if (ref_levels) {
        CurveData r;
        r.label = "reference";
        r.levels = *ref_levels;
        sd.reference = std::move(r);
    }
    for (auto& cd : sd.curves) {
        for (std::size_t n = 0; n < cd.levels.size(); ++n) {
            cd.overshoot.push_back(overshoot_metric(cd.levels[n], bounds));
            if (ref_levels) cd.error_nodal_max.push_back(nodal_max_diff(cd.levels[n], (*ref_levels)[n]));
        }
    }

    // artifacts
    const bool evolutive = cfg.kind == ProblemKind::evolutive;
    CsvArtifact sol;
    sol.filename = cfg.name + "_solution.csv";
    sol.provenance = provenance(cfg);
    if (evolutive) sol.header = {"step", "t"};
    sol.header.push_back("x");
    if (sd.reference) sol.header.push_back(cfg.reference == ReferencePolicy::exact ? "exact" : "reference");
    for (const auto& cd : sd.curves) sol.header.push_back(cd.label);
    for (std::size_t n = 0; n < sd.times.size(); ++n) {
        for (std::size_t i = 0; i < sd.x.size(); ++i) {
            std::vector<std::string> row;
            if (evolutive) {
                row.push_back(std::to_string(n));
                row.push_back(format_number(sd.times[n]));
            }
            row.push_back(format_number(sd.x[i]));
            if (sd.reference) row.push_back(format_number(sd.reference->levels[n][i]));
            for (const auto& cd : sd.curves) row.push_back(format_number(cd.levels[n][i]));
            sol.rows.push_back(std::move(row));
        }
    }
    CsvArtifact met;
    met.filename = cfg.name + "_metrics.csv";
    met.provenance = provenance(cfg);
    met.header = {"curve", "step", "t", "min", "max", "overshoot"};
    if (sd.reference) met.header.push_back("nodal_max_error");
    const bool dense = !evolutive && cfg.reference == ReferencePolicy::exact;
    if (dense) met.header.push_back("dense_max_error");
    for (const auto& cd : sd.curves) {
        for (std::size_t n = 0; n < cd.levels.size(); ++n) {
            const auto [lo, hi] = std::minmax_element(cd.levels[n].begin(), cd.levels[n].end());
            std::vector<std::string> row = {cd.label, std::to_string(n), format_number(sd.times[n]),
                                            format_number(*lo), format_number(*hi), format_number(cd.overshoot[n])};
            if (sd.reference) row.push_back(format_number(cd.error_nodal_max[n]));
            if (dense) row.push_back(format_number(cd.dense_max_error));
            met.rows.push_back(std::move(row));
        }
    }
    res.artifacts = {sol, met};
    res.solution = std::move(sd);
    return res;
}

std::vector<std::string> norm_names(ProblemKind kind, bool dense) {
    if (kind == ProblemKind::stationary) {
        std::vector<std::string> n = {"l2", "h1", "nodal_max"};
        if (dense) n.push_back("dense_max");
        return n;
    }
    return {"linf_l2", "l2_h1", "nodal_max"};
}

std::vector<double> report_values(const ErrorReport& r) { return {r.linf_l2, r.l2_h1, r.nodal_max}; }

void slope_rows(CsvArtifact& a, const std::string& label, const ConvergenceStudy& s) {
    for (std::size_t i = 0; i < s.norms.size(); ++i) {
        const auto& f = s.fits[i];
        const auto [lo, hi] = std::minmax_element(f.pairwise.begin(), f.pairwise.end());
        a.rows.push_back({label, s.parameter, s.norms[i], format_number(f.slope), format_number(*lo),
                          format_number(*hi)});
    }
}

RunResult run_convergence(const RunConfig& cfg) {
    RunResult res;
    res.config = cfg;
    ConvergenceData cd;
    cd.mode = cfg.modes.front();
    cd.comparisons = cfg.comparisons;
    const bool stationary = cfg.kind == ProblemKind::stationary;
    const bool dense = stationary && cfg.reference == ReferencePolicy::exact;
    const auto norms = norm_names(cfg.kind, dense);
    for (std::size_t i = 0; i < cfg.comparisons.size(); ++i) {
        ConvergenceStudy s;
        s.parameter = cfg.sweep == SweepKind::h ? "h" : cfg.sweep == SweepKind::k ? "k" : "M";
        s.norms = norms;
        s.errors.assign(norms.size(), {});
        cd.studies.push_back(std::move(s));
    }

    for (double value : cfg.sweep_values) {
        const int n = cfg.sweep == SweepKind::h ? static_cast<int>(value) : cfg.n_elements;
        const std::optional<int> sweep_m =
            cfg.sweep == SweepKind::M ? std::optional<int>(static_cast<int>(value)) : std::nullopt;
        const SolverMode mode = parse_mode(cfg.modes.front(), sweep_m);
        const Mesh1D mesh(n);
        const double param = cfg.sweep == SweepKind::h ? mesh.h() : value;

        SolutionTrajectory traj;
        std::optional<SolutionTrajectory> ref_traj;
        ReferenceFunction ref_fn;
        if (stationary) {
            const StationaryProblem p = cfg.stationary_problem();
            traj = stationary_trajectory(solve_stationary(p, mesh, mode), n, describe(mode));
            if (cfg.reference == ReferencePolicy::exact) {
                ref_fn = [&cfg](double x, int, double) { return exact_stationary(x, cfg.gamma, cfg.c, cfg.mu); };
            } else {
                const Mesh1D fine(n * fine_refinement);
                ref_traj = stationary_trajectory(solve_stationary(p, fine, Galerkin{}), fine.n_elements(), "galerkin");
            }
        } else {
            const EvolutiveProblem p = cfg.evolutive_problem(cfg.sweep == SweepKind::k ? value : 0.0);
            traj = solve_evolutive(p, mesh, mode);
            switch (cfg.reference) {
            case ReferencePolicy::exact:
                ref_fn = [p](double x, int, double t) { return exact_evolutive_mode(x, t, p.c, p.mu); };
                break;
            case ReferencePolicy::exact_rothe:
                ref_fn = [p](double x, int lvl, double) { return exact_evolutive_mode_rothe(x, lvl, p.k, p.c, p.mu); };
                break;
            case ReferencePolicy::fine_galerkin:
                ref_traj = solve_evolutive(p, Mesh1D(n * fine_refinement), Galerkin{});
                break;
            case ReferencePolicy::converged_spectral:
                ref_traj = solve_evolutive(p, mesh, SpectralVMS{cfg.reference_m});
                break;
            case ReferencePolicy::none: break;
            }
        }

        for (std::size_t ci = 0; ci < cfg.comparisons.size(); ++ci) {
            const Comparison cmp = cfg.comparisons[ci];
            ErrorReport r;
            if (ref_traj) {
                r = error_norms(traj, *ref_traj, cmp);
            } else {
                r = error_norms(traj, ref_fn, cmp);
            }
            auto vals = report_values(r);
            if (dense) {
                vals.push_back(dense_max_error(traj.fields.front(), [&cfg](double x) {
                    return exact_stationary(x, cfg.gamma, cfg.c, cfg.mu);
                }));
            }
            auto& s = cd.studies[ci];
            s.samples.push_back(param);
            for (std::size_t k = 0; k < vals.size(); ++k) s.errors[k].push_back(vals[k]);
        }
    }
    for (auto& s : cd.studies) s.fit();

    CsvArtifact err;
    err.filename = cfg.name + "_errors.csv";
    err.provenance = provenance(cfg);
    err.header = {"comparison", cd.studies.front().parameter};
    if (cfg.sweep == SweepKind::h) err.header.push_back("n_elements");
    for (const auto& nm : norms) err.header.push_back(nm);
    for (std::size_t ci = 0; ci < cd.studies.size(); ++ci) {
        const auto& s = cd.studies[ci];
        for (std::size_t i = 0; i < s.samples.size(); ++i) {
            std::vector<std::string> row = {to_string(cfg.comparisons[ci]), format_number(s.samples[i])};
            if (cfg.sweep == SweepKind::h) row.push_back(std::to_string(static_cast<int>(cfg.sweep_values[i])));
            for (const auto& e : s.errors) row.push_back(format_number(e[i]));
            err.rows.push_back(std::move(row));
        }
    }
    CsvArtifact sl;
    sl.filename = cfg.name + "_slopes.csv";
    sl.provenance = provenance(cfg);
    sl.header = {"comparison", "parameter", "norm", "slope", "min_pairwise", "max_pairwise"};
    for (std::size_t ci = 0; ci < cd.studies.size(); ++ci) slope_rows(sl, to_string(cfg.comparisons[ci]), cd.studies[ci]);
    res.artifacts = {err, sl};
    res.convergence = std::move(cd);
    return res;
}

RunResult run_tau_table(const RunConfig& cfg) {
    RunResult res;
    res.config = cfg;
    TauTableData td;
    const double h = 1.0 / cfg.n_elements;
    for (double pe : cfg.peclet_values) {
        const double c = 2.0 * pe * cfg.mu / h;
        const double exact = tau_exact(cfg.k, c, cfg.mu, h);
        const OperatorScaling scaling = OperatorScaling::evolutive(cfg.k, c, cfg.mu);
        ConvergenceStudy s;
        s.parameter = "M";
        s.norms = {"abs_diff"};
        s.errors.assign(1, {});
        for (double mv : cfg.sweep_values) {
            const int M = static_cast<int>(mv);
            const double tm = tau_truncated(ElementSpectralBasis(0.0, h, scaling, M));
            td.rows.push_back({pe, c, M, exact, tm});
            s.samples.push_back(M);
            s.errors[0].push_back(std::abs(exact - tm));
        }
        s.fit();
        td.truncation.push_back(std::move(s));
    }
    if (!cfg.asymptotic_k.empty()) {
        ConvergenceStudy s;
        s.parameter = "k";
        s.norms = {"abs_diff"};
        s.errors.assign(1, {});
        for (double k : cfg.asymptotic_k) {
            const double t = tau_exact(k, cfg.c, cfg.mu, k);
            const double a = k / (12.0 * cfg.mu) - k * k / (120.0 * cfg.mu * cfg.mu);
            td.asymptotic.push_back({k, t, a});
            s.samples.push_back(k);
            s.errors[0].push_back(std::abs(t - a));
        }
        s.fit();
        td.asymptotic_study = std::move(s);
    }

    CsvArtifact tab;
    tab.filename = cfg.name + "_tau.csv";
    tab.provenance = provenance(cfg);
    tab.header = {"peclet", "c", "M", "tau_exact", "tau_truncated", "abs_diff"};
    for (const auto& r : td.rows) {
        tab.rows.push_back({format_number(r.peclet), format_number(r.c), std::to_string(r.M), format_number(r.tau_exact),
                            format_number(r.tau_truncated), format_number(std::abs(r.tau_exact - r.tau_truncated))});
    }
    CsvArtifact sl;
    sl.filename = cfg.name + "_slopes.csv";
    sl.provenance = provenance(cfg);
    sl.header = {"study", "parameter", "norm", "slope", "min_pairwise", "max_pairwise"};
    for (std::size_t i = 0; i < td.truncation.size(); ++i) {
        slope_rows(sl, "truncation_peclet_" + format_number(cfg.peclet_values[i]), td.truncation[i]);
    }
    res.artifacts = {tab};
    if (td.asymptotic_study) {
        slope_rows(sl, "asymptotic", *td.asymptotic_study);
        CsvArtifact as;
        as.filename = cfg.name + "_asymptotic.csv";
        as.provenance = provenance(cfg);
        as.header = {"k", "tau_exact", "asymptote", "abs_diff"};
        for (const auto& r : td.asymptotic) {
            as.rows.push_back({format_number(r.k), format_number(r.tau_exact), format_number(r.asymptote),
                               format_number(std::abs(r.tau_exact - r.asymptote))});
        }
        res.artifacts.push_back(as);
    }
    res.artifacts.push_back(sl);
    res.tau = std::move(td);
    return res;
}

}  // namespace

RunResult execute(const RunConfig& config) {
    config.validate();
    if (config.kind == ProblemKind::tau_table) return run_tau_table(config);
    if (config.study == StudyKind::convergence) return run_convergence(config);
    return run_solution(config);
}

std::vector<RunResult> run_preset(const std::string& name) {
    std::vector<RunResult> out;
    for (const auto& c : preset_configs(name)) out.push_back(execute(c));
    return out;
}

std::vector<RunResult> run_config(const std::string& path) {
    std::vector<RunResult> out;
    for (const auto& c : load_config(path)) out.push_back(execute(c));
    return out;
}

}  // namespace vms
