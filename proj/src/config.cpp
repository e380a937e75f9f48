#include "depmix/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "depmix/errors.hpp"

namespace depmix {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) {
        return "";
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

const std::string* find(const IniDoc& doc, const std::string& section, const std::string& key) {
    const auto sit = doc.find(section);
    if (sit == doc.end()) {
        return nullptr;
    }
    for (const auto& [k, v] : sit->second) {
        if (k == key) {
            return &v;
        }
    }
    return nullptr;
}

double get_double(const IniDoc& doc, const std::string& s, const std::string& k, double dflt) {
    const auto* v = find(doc, s, k);
    return v ? std::stod(*v) : dflt;
}

std::int64_t get_int(const IniDoc& doc, const std::string& s, const std::string& k,
                     std::int64_t dflt) {
    const auto* v = find(doc, s, k);
    return v ? std::stoll(*v) : dflt;
}

bool get_bool(const IniDoc& doc, const std::string& s, const std::string& k, bool dflt) {
    const auto* v = find(doc, s, k);
    if (!v) {
        return dflt;
    }
    const std::string w = lower(*v);
    if (w == "true" || w == "1" || w == "yes") {
        return true;
    }
    if (w == "false" || w == "0" || w == "no") {
        return false;
    }
    throw InvalidParameter("config: bad boolean '" + *v + "' for " + s + "." + k);
}

std::string get_str(const IniDoc& doc, const std::string& s, const std::string& k,
                    const std::string& dflt) {
    const auto* v = find(doc, s, k);
    return v ? *v : dflt;
}

InnovationLaw parse_innovation(const IniDoc& doc) {
    const std::string kind = lower(get_str(doc, "innovation", "kind", "rademacher"));
    if (kind == "rademacher") {
        return InnovationLaw::rademacher();
    }
    if (kind == "bernoulli") {
        return InnovationLaw::bernoulli(get_double(doc, "innovation", "p", 0.5));
    }
    if (kind == "gaussian") {
        return InnovationLaw::gaussian(get_double(doc, "innovation", "mean", 0.0),
                                       get_double(doc, "innovation", "stddev", 1.0));
    }
    if (kind == "pareto") {
        return InnovationLaw::pareto(get_double(doc, "innovation", "shape", 1.5));
    }
    throw InvalidParameter("config: unknown innovation kind '" + kind + "'");
}

FilterSpec parse_filter(const IniDoc& doc) {
    const InnovationLaw law = parse_innovation(doc);
    const std::string kind = lower(get_str(doc, "filter", "kind", "iid_passthrough"));
    FilterSpec f;
    if (kind == "iid_passthrough") {
        f = FilterSpec::iid_passthrough(law);
    } else if (kind == "linear_geometric") {
        f = FilterSpec::linear_geometric(get_double(doc, "filter", "rho", 0.5), law);
    } else if (kind == "tv_ar1") {
        f = FilterSpec::tv_ar1({get_double(doc, "filter", "ar_c0", 0.5),
                                get_double(doc, "filter", "ar_c1", 0.0)},
                               law);
    } else if (kind == "tv_ma") {
        // Lag coefficients "c0,c1" pairs separated by ';'.
        std::vector<AffineCoef> coefs;
        for (const auto& item : split_list(get_str(doc, "filter", "ma", "1,0"))) {
            std::vector<double> pair;
            std::stringstream ss(item);
            std::string tok;
            while (std::getline(ss, tok, ';')) {
                pair.push_back(std::stod(tok));
            }
            if (pair.size() == 1) {
                pair.push_back(0.0);
            }
            coefs.push_back({pair[0], pair[1]});
        }
        f = FilterSpec::tv_ma(std::move(coefs), law);
    } else if (kind == "random_walk_scenery") {
        f = FilterSpec::random_walk_scenery();
    } else {
        throw InvalidParameter("config: unknown filter kind '" + kind + "'");
    }
    f.truncation_lag = get_int(doc, "filter", "truncation_lag", -1);
    f.centered = get_bool(doc, "filter", "centered", false);
    f.validate();
    return f;
}

BinScheme parse_scheme(const IniDoc& doc) {
    const std::string kind = lower(get_str(doc, "mixing", "scheme", "quantile"));
    if (kind == "quantile") {
        return BinScheme::quantile(static_cast<int>(get_int(doc, "mixing", "bins", 8)));
    }
    if (kind == "dyadic") {
        std::vector<int> pd, fd;
        for (auto v : parse_ints(get_str(doc, "mixing", "past_depths", "0"))) {
            pd.push_back(static_cast<int>(v));
        }
        for (auto v : parse_ints(get_str(doc, "mixing", "future_depths", "12"))) {
            fd.push_back(static_cast<int>(v));
        }
        return BinScheme::dyadic(std::move(pd), std::move(fd));
    }
    throw InvalidParameter("config: unknown bin scheme '" + kind + "'");
}

} // namespace

IniDoc parse_ini(const std::string& text) {
    IniDoc doc;
    std::string section = "run";
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw InvalidParameter("config: malformed section header '" + line + "'");
            }
            section = lower(trim(line.substr(1, line.size() - 2)));
            doc[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw InvalidParameter("config: expected key = value, got '" + line + "'");
        }
        doc[section].emplace_back(lower(trim(line.substr(0, eq))), trim(line.substr(eq + 1)));
    }
    return doc;
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (!tok.empty()) {
            out.push_back(tok);
        }
    }
    return out;
}

std::vector<double> parse_doubles(const std::string& value) {
    std::vector<double> out;
    for (const auto& tok : split_list(value)) {
        out.push_back(std::stod(tok));
    }
    return out;
}

std::vector<std::int64_t> parse_ints(const std::string& value) {
    std::vector<std::int64_t> out;
    for (const auto& tok : split_list(value)) {
        const auto dash = tok.find('-', 1);
        if (dash != std::string::npos && tok.find_first_not_of("0123456789-") == std::string::npos &&
            tok[0] != '-') {
            // Range "a-b".
            const std::int64_t lo = std::stoll(tok.substr(0, dash));
            const std::int64_t hi = std::stoll(tok.substr(dash + 1));
            for (std::int64_t v = lo; v <= hi; ++v) {
                out.push_back(v);
            }
        } else {
            out.push_back(std::stoll(tok));
        }
    }
    return out;
}

ExperimentConfig ExperimentConfig::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open config " + path.string());
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return from_ini_text(ss.str());
}

ExperimentConfig ExperimentConfig::from_ini_text(const std::string& text) {
    const IniDoc doc = parse_ini(text);
    ExperimentConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(get_int(doc, "run", "seed", 1));
    cfg.out_dir = get_str(doc, "run", "out", "out");
    cfg.checks = split_list(get_str(doc, "run", "checks", ""));
    if (const auto* v = find(doc, "run", "serial"); v && get_bool(doc, "run", "serial", false)) {
        cfg.exec = Exec::Serial;
    }

    cfg.filter = parse_filter(doc);

    cfg.physdep_p = get_double(doc, "physdep", "p", 1.0);
    cfg.physdep_max_lag = get_int(doc, "physdep", "max_lag", 30);
    cfg.physdep_replicas = get_int(doc, "physdep", "replicas", 100000);
    if (const auto* v = find(doc, "physdep", "t_grid")) {
        cfg.physdep_t_grid = parse_doubles(*v);
    }
    cfg.physdep_bootstrap = static_cast<int>(get_int(doc, "physdep", "bootstrap", 200));

    cfg.mixing.n = get_int(doc, "mixing", "n", 256);
    cfg.mixing.j = get_int(doc, "mixing", "j", -1);
    cfg.mixing.a = get_int(doc, "mixing", "a", 2);
    cfg.mixing.b = get_int(doc, "mixing", "b", 2);
    cfg.mixing.scheme = parse_scheme(doc);
    cfg.mixing.replicas = get_int(doc, "mixing", "replicas", 1'000'000);
    cfg.mixing.options.min_cell = get_int(doc, "mixing", "min_cell", 50);
    cfg.mixing.options.bootstrap_resamples =
        static_cast<int>(get_int(doc, "mixing", "bootstrap", 50));
    cfg.mixing.options.seed = cfg.seed;
    if (const auto* v = find(doc, "mixing", "k_list")) {
        cfg.mixing_k = parse_ints(*v);
    }
    if (const auto* v = find(doc, "theorem", "k_list")) {
        cfg.theorem_k = parse_ints(*v);
    }

    cfg.transport_instances = get_int(doc, "transport", "instances", 100);
    cfg.transport_probes = static_cast<int>(get_int(doc, "transport", "probes", 30));
    if (const auto* v = find(doc, "mollify", "eps_grid")) {
        cfg.mollify_eps = parse_doubles(*v);
    }
    if (const auto* v = find(doc, "mollify", "shifts")) {
        cfg.gaussian_shifts = parse_doubles(*v);
    }
    cfg.mixing.exec = cfg.exec;
    cfg.mixing.options.exec = cfg.exec;
    cfg.validate();
    return cfg;
}

std::string ExperimentConfig::to_ini_text() const {
    std::ostringstream os;
    os << "[run]\n";
    os << "seed = " << seed << "\n";
    os << "out = " << out_dir << "\n";
    os << "checks = ";
    for (std::size_t i = 0; i < checks.size(); ++i) {
        os << (i ? "," : "") << checks[i];
    }
    os << "\n";
    os << "serial = " << (exec == Exec::Serial ? "true" : "false") << "\n";

    os << "[filter]\n";
    switch (filter.kind) {
    case FilterKind::IidPassthrough:
        os << "kind = iid_passthrough\n";
        break;
    case FilterKind::LinearGeometric:
        os << "kind = linear_geometric\n";
        os << "rho = " << filter.rho << "\n";
        break;
    case FilterKind::TvAR1:
        os << "kind = tv_ar1\n";
        os << "ar_c0 = " << filter.ar_coef.c0 << "\n";
        os << "ar_c1 = " << filter.ar_coef.c1 << "\n";
        break;
    case FilterKind::TvMA: {
        os << "kind = tv_ma\n";
        os << "ma = ";
        for (std::size_t i = 0; i < filter.ma_coefs.size(); ++i) {
            os << (i ? "," : "") << filter.ma_coefs[i].c0 << ";" << filter.ma_coefs[i].c1;
        }
        os << "\n";
        break;
    }
    case FilterKind::RandomWalkScenery:
        os << "kind = random_walk_scenery\n";
        break;
    }
    os << "truncation_lag = " << filter.truncation_lag << "\n";
    os << "centered = " << (filter.centered ? "true" : "false") << "\n";

    os << "[innovation]\n";
    switch (filter.innovation.kind) {
    case InnovationKind::Rademacher:
        os << "kind = rademacher\n";
        break;
    case InnovationKind::Bernoulli:
        os << "kind = bernoulli\n"
           << "p = " << filter.innovation.p << "\n";
        break;
    case InnovationKind::Gaussian:
        os << "kind = gaussian\n"
           << "mean = " << filter.innovation.mean << "\n"
           << "stddev = " << filter.innovation.stddev << "\n";
        break;
    case InnovationKind::Pareto:
        os << "kind = pareto\n"
           << "shape = " << filter.innovation.shape << "\n";
        break;
    }

    os << "[physdep]\n";
    os << "p = " << physdep_p << "\n";
    os << "max_lag = " << physdep_max_lag << "\n";
    os << "replicas = " << physdep_replicas << "\n";
    if (!physdep_t_grid.empty()) {
        os << "t_grid = ";
        for (std::size_t i = 0; i < physdep_t_grid.size(); ++i) {
            os << (i ? "," : "") << physdep_t_grid[i];
        }
        os << "\n";
    }
    os << "bootstrap = " << physdep_bootstrap << "\n";

    os << "[mixing]\n";
    os << "n = " << mixing.n << "\n";
    os << "j = " << mixing.j << "\n";
    os << "a = " << mixing.a << "\n";
    os << "b = " << mixing.b << "\n";
    if (mixing.scheme.kind == BinScheme::Kind::Quantile) {
        os << "scheme = quantile\n";
        os << "bins = " << mixing.scheme.bins << "\n";
    } else {
        os << "scheme = dyadic\n";
        os << "past_depths = ";
        for (std::size_t i = 0; i < mixing.scheme.past_depths.size(); ++i) {
            os << (i ? "," : "") << mixing.scheme.past_depths[i];
        }
        os << "\nfuture_depths = ";
        for (std::size_t i = 0; i < mixing.scheme.future_depths.size(); ++i) {
            os << (i ? "," : "") << mixing.scheme.future_depths[i];
        }
        os << "\n";
    }
    os << "replicas = " << mixing.replicas << "\n";
    os << "min_cell = " << mixing.options.min_cell << "\n";
    os << "bootstrap = " << mixing.options.bootstrap_resamples << "\n";
    os << "k_list = ";
    for (std::size_t i = 0; i < mixing_k.size(); ++i) {
        os << (i ? "," : "") << mixing_k[i];
    }
    os << "\n";

    os << "[theorem]\n";
    os << "k_list = ";
    for (std::size_t i = 0; i < theorem_k.size(); ++i) {
        os << (i ? "," : "") << theorem_k[i];
    }
    os << "\n";

    os << "[transport]\n";
    os << "instances = " << transport_instances << "\n";
    os << "probes = " << transport_probes << "\n";

    os << "[mollify]\n";
    os << "eps_grid = ";
    for (std::size_t i = 0; i < mollify_eps.size(); ++i) {
        os << (i ? "," : "") << mollify_eps[i];
    }
    os << "\nshifts = ";
    for (std::size_t i = 0; i < gaussian_shifts.size(); ++i) {
        os << (i ? "," : "") << gaussian_shifts[i];
    }
    os << "\n";
    return os.str();
}

void ExperimentConfig::validate() const {
    filter.validate();
    static const std::vector<std::string> known{"physdep", "mixing",  "transport",
                                               "mollify", "theorem", "examples"};
    for (const auto& c : checks) {
        if (std::find(known.begin(), known.end(), c) == known.end()) {
            throw InvalidParameter("config: unknown check '" + c + "'");
        }
    }
}

} // namespace depmix
