#include <charconv>
#include <fstream>
#include <sstream>

#include "spx/harness.hpp"

namespace spx {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value)
{
    throw Error(ErrorCode::Parameter, "invalid value for " + key + ": '" + value + "'");
}

template <typename T>
T parse_number(const std::string& key, const std::string& raw)
{
    const std::string value = trim(raw);
    T out{};
    const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
    if (value.empty() || res.ec != std::errc() || res.ptr != value.data() + value.size())
        bad_value(key, raw);
    return out;
}

std::vector<double> parse_list(const std::string& key, const std::string& value, std::size_t n)
{
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(parse_number<double>(key, item));
    if (out.size() != n)
        bad_value(key, value);
    return out;
}

int parse_rank(const std::string& key, double v, const std::string& value)
{
    if (v != static_cast<int>(v))
        bad_value(key, value);
    return static_cast<int>(v);
}

} // namespace

void set_config_value(TrackerConfig& c, const std::string& raw_key, const std::string& value)
{
    const std::string key = trim(raw_key);
    if (key == "template_width") c.template_width = parse_number<int>(key, value);
    else if (key == "template_height") c.template_height = parse_number<int>(key, value);
    else if (key == "superpixels") c.superpixels = parse_number<int>(key, value);
    else if (key == "compactness") c.compactness = parse_number<double>(key, value);
    else if (key == "bins") c.bins = parse_number<int>(key, value);
    else if (key == "dictionary_size") c.dictionary_size = parse_number<int>(key, value);
    else if (key == "lambda") c.lambda = parse_number<double>(key, value);
    else if (key == "particles") c.particles = parse_number<int>(key, value);
    else if (key == "dictionary_samples") c.dictionary_samples = parse_number<int>(key, value);
    else if (key == "negatives") c.negatives = parse_number<int>(key, value);
    else if (key == "update_rate") c.update_rate = parse_number<int>(key, value);
    else if (key == "gamma") c.gamma = parse_number<double>(key, value);
    else if (key == "threshold") c.threshold = parse_number<double>(key, value);
    else if (key == "forgetting") c.forgetting = parse_number<double>(key, value);
    else if (key == "annulus_inner") c.annulus.inner = parse_number<double>(key, value);
    else if (key == "annulus_outer") c.annulus.outer = parse_number<double>(key, value);
    else if (key == "rng_seed") c.rng_seed = parse_number<std::uint64_t>(key, value);
    else if (key == "noise") {
        const auto v = parse_list(key, value, 6);
        std::copy(v.begin(), v.end(), c.noise.sigmas.begin());
    } else if (key == "ranks") {
        const auto v = parse_list(key, value, 3);
        c.ranks = {parse_rank(key, v[0], value), parse_rank(key, v[1], value),
                   parse_rank(key, v[2], value)};
    } else {
        throw Error(ErrorCode::Parameter, "unknown config key: " + key);
    }
}

TrackerConfig parse_config(const std::string& text)
{
    TrackerConfig config;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        if (trim(line).empty())
            continue;
        const auto eq = line.find_first_of("=:");
        if (eq == std::string::npos)
            throw Error(ErrorCode::Parameter,
                        "config line " + std::to_string(line_no) + " is not 'key = value'");
        try {
            set_config_value(config, line.substr(0, eq), line.substr(eq + 1));
        } catch (const Error& e) {
            throw Error(e.code(), "config line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    validate(config);
    return config;
}

TrackerConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::Io, "cannot read config file: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string format_config(const TrackerConfig& c)
{
    std::ostringstream out;
    out.precision(17);
    const auto& n = c.noise.sigmas;
    out << "template_width = " << c.template_width << '\n'
        << "template_height = " << c.template_height << '\n'
        << "superpixels = " << c.superpixels << '\n'
        << "compactness = " << c.compactness << '\n'
        << "bins = " << c.bins << '\n'
        << "dictionary_size = " << c.dictionary_size << '\n'
        << "lambda = " << c.lambda << '\n'
        << "particles = " << c.particles << '\n'
        << "dictionary_samples = " << c.dictionary_samples << '\n'
        << "negatives = " << c.negatives << '\n'
        << "update_rate = " << c.update_rate << '\n'
        << "gamma = " << c.gamma << '\n'
        << "threshold = " << c.threshold << '\n'
        << "noise = " << n[0] << ',' << n[1] << ',' << n[2] << ',' << n[3] << ',' << n[4] << ','
        << n[5] << '\n'
        << "ranks = " << c.ranks.r1 << ',' << c.ranks.r2 << ',' << c.ranks.r3 << '\n'
        << "forgetting = " << c.forgetting << '\n'
        << "annulus_inner = " << c.annulus.inner << '\n'
        << "annulus_outer = " << c.annulus.outer << '\n'
        << "rng_seed = " << c.rng_seed << '\n';
    return out.str();
}

} // namespace spx
