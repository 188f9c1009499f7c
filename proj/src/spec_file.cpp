#include "varexp/spec_file.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include <fmt/core.h>

namespace varexp {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
        throw std::invalid_argument(fmt::format("spec: '{}' expects a number, got '{}'", key, v));
    return out;
}

long long to_int(const std::string& key, const std::string& v) {
    long long out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
        throw std::invalid_argument(fmt::format("spec: '{}' expects an integer, got '{}'", key, v));
    return out;
}

int to_count(const std::string& key, const std::string& v) {
    const long long n = to_int(key, v);
    if (n < 0 || n > 1'000'000'000) throw std::invalid_argument(fmt::format("spec: '{}' out of range", key));
    return static_cast<int>(n);
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw std::invalid_argument(fmt::format("spec: '{}' expects a boolean, got '{}'", key, v));
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

std::map<std::string, std::string> parse_key_values(std::istream& in, const std::string& origin) {
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(fmt::format("{}:{}: expected 'key = value'", origin, lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw std::invalid_argument(fmt::format("{}:{}: empty key or value", origin, lineno));
        if (!kv.emplace(key, value).second)
            throw std::invalid_argument(fmt::format("{}:{}: duplicate key '{}'", origin, lineno, key));
    }
    return kv;
}

SpecFile parse_spec(std::istream& in, const std::string& origin) {
    const auto kv = parse_key_values(in, origin);
    SpecFile out;
    ExperimentSpec& e = out.experiment;

    std::size_t n = e.shape.cols, rows = 1, cols = 0;
    GaussianNoise gauss;
    double g_lo = 0.0, g_hi = 1.0;
    bool has_gauss = false;
    SaltPepperNoise sp;
    double sp_lo = 0.0, sp_hi = 1.0;
    bool has_sp = false;

    using Setter = std::function<void(const std::string&, const std::string&)>;
    const auto num = [](double& dst) -> Setter { return [&dst](const auto& k, const auto& v) { dst = to_double(k, v); }; };
    const auto cnt = [](int& dst) -> Setter { return [&dst](const auto& k, const auto& v) { dst = to_count(k, v); }; };
    const auto gnum = [&](double& dst) -> Setter {
        return [&dst, &has_gauss](const auto& k, const auto& v) { dst = to_double(k, v); has_gauss = true; };
    };
    const auto spnum = [&](double& dst) -> Setter {
        return [&dst, &has_sp](const auto& k, const auto& v) { dst = to_double(k, v); has_sp = true; };
    };

    const std::map<std::string, Setter> setters = {
        {"name", [&](const auto&, const auto& v) { e.name = v; }},
        {"seed", [&](const auto& k, const auto& v) {
             const long long s = to_int(k, v);
             if (s < 0) throw std::invalid_argument("spec: seed must be non-negative");
             e.seed = static_cast<std::uint64_t>(s);
         }},
        {"problem.n", [&](const auto& k, const auto& v) { n = static_cast<std::size_t>(to_count(k, v)); }},
        {"problem.rows", [&](const auto& k, const auto& v) { rows = static_cast<std::size_t>(to_count(k, v)); }},
        {"problem.cols", [&](const auto& k, const auto& v) { cols = static_cast<std::size_t>(to_count(k, v)); }},
        {"truth.kind", [&](const auto&, const auto& v) { e.truth = v; }},
        {"truth.spikes", [&](const auto& k, const auto& v) { e.spikes.count = static_cast<std::size_t>(to_count(k, v)); }},
        {"truth.amp_lo", num(e.spikes.amp_lo)},
        {"truth.amp_hi", num(e.spikes.amp_hi)},
        {"truth.signed", [&](const auto& k, const auto& v) { e.spikes.signed_amplitudes = to_bool(k, v); }},
        {"truth.split", num(e.split)},
        {"truth.bumps", cnt(e.smooth.bumps)},
        {"truth.bump_amplitude", num(e.smooth.amplitude)},
        {"truth.bump_width", num(e.smooth.width)},
        {"truth.filaments", cnt(e.filaments)},
        {"truth.points", cnt(e.points)},
        {"truth.filament_amplitude", num(e.filament_amplitude)},
        {"kernel.size", cnt(e.kernel_size)},
        {"kernel.sigma", num(e.kernel_sigma)},
        {"kernel.boundary", [&](const auto&, const auto& v) { e.boundary = parse_boundary(v); }},
        {"noise.gaussian.sigma", gnum(gauss.sigma)},
        {"noise.gaussian.lo", gnum(g_lo)},
        {"noise.gaussian.hi", gnum(g_hi)},
        {"noise.saltpepper.density", spnum(sp.density)},
        {"noise.saltpepper.low", spnum(sp.low)},
        {"noise.saltpepper.high", spnum(sp.high)},
        {"noise.saltpepper.lo", spnum(sp_lo)},
        {"noise.saltpepper.hi", spnum(sp_hi)},
        {"exponent.builder", [&](const auto&, const auto& v) { e.exponent_builder = v; }},
        {"exponent.p_lo", num(e.p_lo)},
        {"exponent.p_hi", num(e.p_hi)},
        {"exponent.mask_lo", num(e.mask_lo)},
        {"exponent.mask_hi", num(e.mask_hi)},
        {"exponent.threshold", num(e.threshold)},
        {"exponent.probe_iters", cnt(e.probe_iters)},
        {"exponent.dilate", cnt(e.dilate)},
        {"fidelity.kind", [&](const auto&, const auto& v) { e.fidelity = v; }},
        {"fidelity.q", num(e.q)},
        {"solver.list", [&](const auto&, const auto& v) { e.solvers = split_list(v); }},
        {"solver.tau0", num(e.solver.tau0)},
        {"solver.tau_min", num(e.solver.tau_min)},
        {"solver.backtrack_rho", num(e.solver.backtrack_rho)},
        {"solver.lambda", num(e.solver.lambda)},
        {"solver.max_iters", cnt(e.solver.max_iters)},
        {"solver.max_inner", cnt(e.solver.max_inner)},
        {"solver.scale_by_p", [&](const auto& k, const auto& v) { e.solver.scale_by_p = to_bool(k, v); }},
        {"solver.stop", [&](const auto&, const auto& v) {
             if (v != "relative_change")
                 throw std::invalid_argument("spec: solver.stop supports 'relative_change' (the rate study sets its own)");
         }},
        {"solver.eps", num(e.solver.stop.eps)},
        {"compare.p_const", num(e.p_const)},
        {"rates.reference_iters", cnt(e.reference_iters)},
        {"rates.eps", num(e.rate_eps)},
        {"rates.max_iters", cnt(e.rate_max_iters)},
        {"output.timing", [&](const auto& k, const auto& v) { out.timing = to_bool(k, v); }},
    };

    for (const auto& [key, value] : kv) {
        const auto it = setters.find(key);
        if (it == setters.end()) throw std::invalid_argument(fmt::format("{}: unknown key '{}'", origin, key));
        it->second(key, value);
    }

    if (cols > 0 || rows > 1) {
        if (cols == 0 || rows == 0) throw std::invalid_argument("spec: problem.rows and problem.cols must both be positive");
        e.shape = Shape::grid(rows, cols);
    } else {
        e.shape = Shape::line(n);
    }
    if (has_gauss) e.noise.push_back({gauss, g_lo, g_hi});
    if (has_sp) {
        if (!(sp.density >= 0.0 && sp.density <= 1.0))
            throw std::invalid_argument("spec: noise.saltpepper.density must lie in [0, 1]");
        e.noise.push_back({sp, sp_lo, sp_hi});
    }
    e.solver.stop = StopRule::relative_change(e.solver.stop.eps);
    e.solver.record_timing = out.timing;
    e.validate();
    return out;
}

SpecFile parse_spec_string(const std::string& text) {
    std::istringstream in(text);
    return parse_spec(in);
}

SpecFile load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(fmt::format("cannot open spec file '{}'", path));
    return parse_spec(in, path);
}

void apply_seed_override(SpecFile& spec) {
    const char* env = std::getenv("VAREXP_SEED");
    if (!env || !*env) return;
    const std::string v = trim(env);
    const long long s = to_int("VAREXP_SEED", v);
    if (s < 0) throw std::invalid_argument("VAREXP_SEED must be non-negative");
    spec.experiment.seed = static_cast<std::uint64_t>(s);
}

}  // namespace varexp
