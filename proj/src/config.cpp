#include "lindrec/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace lindrec
{
    ConfigError::ConfigError(int line, const std::string& message)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message), line_(line)
    {
    }

    const char* to_string(ExperimentKind k) noexcept
    {
        switch (k)
        {
        case ExperimentKind::Simulate:
            return "simulate";
        case ExperimentKind::Ladder:
            return "ladder";
        case ExperimentKind::MaxDist:
            return "maxdist";
        case ExperimentKind::Subordinate:
            return "subordinate";
        case ExperimentKind::Renewal:
            return "renewal";
        case ExperimentKind::Backward:
            return "backward";
        case ExperimentKind::Classify:
            return "classify";
        case ExperimentKind::Essential:
            return "essential";
        }
        return "?";
    }

    std::optional<ExperimentKind> parse_experiment_kind(std::string_view name)
    {
        for (auto k : {ExperimentKind::Simulate, ExperimentKind::Ladder, ExperimentKind::MaxDist,
                       ExperimentKind::Subordinate, ExperimentKind::Renewal, ExperimentKind::Backward,
                       ExperimentKind::Classify, ExperimentKind::Essential})
        {
            if (name == to_string(k))
            {
                return k;
            }
        }
        return std::nullopt;
    }

    std::uint64_t fnv1a64(std::string_view bytes) noexcept
    {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char c : bytes)
        {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        return h;
    }

    namespace
    {
        std::string_view trim(std::string_view s)
        {
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
            {
                s.remove_prefix(1);
            }
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
            {
                s.remove_suffix(1);
            }
            return s;
        }

        // Splits on `sep` outside parentheses and braces.
        std::vector<std::string_view> split_top(std::string_view s, char sep)
        {
            std::vector<std::string_view> out;
            int depth = 0;
            std::size_t start = 0;
            for (std::size_t i = 0; i < s.size(); ++i)
            {
                const char c = s[i];
                if (c == '(' || c == '{')
                {
                    ++depth;
                }
                else if (c == ')' || c == '}')
                {
                    --depth;
                }
                else if (c == sep && depth == 0)
                {
                    out.push_back(trim(s.substr(start, i - start)));
                    start = i + 1;
                }
            }
            out.push_back(trim(s.substr(start)));
            if (out.size() == 1 && out[0].empty())
            {
                out.clear();
            }
            return out;
        }

        std::int64_t parse_int(std::string_view s)
        {
            s = trim(s);
            std::int64_t v = 0;
            if (!s.empty() && s.front() == '+')
            {
                s.remove_prefix(1);
            }
            const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc() || p != s.data() + s.size() || s.empty())
            {
                throw std::invalid_argument("expected an integer, got '" + std::string(s) + "'");
            }
            return v;
        }

        std::uint64_t parse_uint(std::string_view s)
        {
            s = trim(s);
            std::uint64_t v = 0;
            const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc() || p != s.data() + s.size() || s.empty())
            {
                throw std::invalid_argument("expected an unsigned integer, got '" + std::string(s) + "'");
            }
            return v;
        }

        double parse_double(std::string_view s)
        {
            s = trim(s);
            return to_double(parse_rational(s));
        }

        bool parse_bool(std::string_view s)
        {
            s = trim(s);
            if (s == "true" || s == "1" || s == "yes")
            {
                return true;
            }
            if (s == "false" || s == "0" || s == "no")
            {
                return false;
            }
            throw std::invalid_argument("expected true or false, got '" + std::string(s) + "'");
        }

        // name{ body } -> (name, body)
        std::pair<std::string_view, std::string_view> block(std::string_view s)
        {
            s = trim(s);
            const auto open = s.find('{');
            if (open == std::string_view::npos || s.back() != '}')
            {
                throw std::invalid_argument("expected name{ ... }, got '" + std::string(s) + "'");
            }
            return {trim(s.substr(0, open)), trim(s.substr(open + 1, s.size() - open - 2))};
        }

        IncrementLaw parse_scalar_law(std::string_view name, std::string_view body)
        {
            if (name == "finite")
            {
                std::vector<std::pair<std::int64_t, Rational>> entries;
                for (auto item : split_top(body, ','))
                {
                    const auto colon = item.find(':');
                    if (colon == std::string_view::npos)
                    {
                        throw std::invalid_argument("finite atom needs value:prob, got '" + std::string(item) + "'");
                    }
                    entries.emplace_back(parse_int(item.substr(0, colon)), parse_rational(item.substr(colon + 1)));
                }
                return IncrementLaw::finite_support(std::move(entries));
            }
            if (name == "stable")
            {
                std::map<std::string, double> p;
                for (auto item : split_top(body, ','))
                {
                    const auto eq = item.find('=');
                    if (eq == std::string_view::npos)
                    {
                        throw std::invalid_argument("stable parameter needs name=value, got '" + std::string(item) + "'");
                    }
                    const std::string key(trim(item.substr(0, eq)));
                    if (key != "alpha" && key != "beta" && key != "scale" && key != "log_power")
                    {
                        throw std::invalid_argument("unknown stable parameter '" + key + "'");
                    }
                    if (!p.emplace(key, parse_double(item.substr(eq + 1))).second)
                    {
                        throw std::invalid_argument("repeated stable parameter '" + key + "'");
                    }
                }
                if (!p.count("alpha") || !p.count("beta"))
                {
                    throw std::invalid_argument("stable law needs alpha and beta");
                }
                return IncrementLaw::stable_lattice(p["alpha"], p["beta"], p.count("scale") ? p["scale"] : 1.0,
                                                    p.count("log_power") ? p["log_power"] : 0.0);
            }
            throw std::invalid_argument("unknown law kind '" + std::string(name) + "'");
        }

        std::string fmt_double(double v)
        {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            return buf;
        }

        std::string describe_spec(const LawSpec& s)
        {
            return std::visit([](const auto& l) { return l.describe(); }, s);
        }

        // Collapses whitespace runs so that multi-line blocks hash like their one-line form.
        std::string squash(std::string_view s)
        {
            std::string out;
            bool space = false;
            for (char c : trim(s))
            {
                if (std::isspace(static_cast<unsigned char>(c)))
                {
                    space = true;
                    continue;
                }
                if (space)
                {
                    out.push_back(' ');
                    space = false;
                }
                out.push_back(c);
            }
            return out;
        }
    }

    LawSpec parse_law(std::string_view text)
    {
        const auto [name, body] = block(text);
        if (name == "joint")
        {
            std::vector<std::pair<Vec, Rational>> entries;
            for (auto item : split_top(body, ','))
            {
                item = trim(item);
                const auto close = item.find(')');
                if (item.empty() || item.front() != '(' || close == std::string_view::npos)
                {
                    throw std::invalid_argument("joint atom needs (v1,...,vd):prob, got '" + std::string(item) + "'");
                }
                Vec v;
                for (auto c : split_top(item.substr(1, close - 1), ','))
                {
                    v.push_back(parse_int(c));
                }
                const auto rest = trim(item.substr(close + 1));
                if (rest.empty() || rest.front() != ':')
                {
                    throw std::invalid_argument("joint atom needs ':prob' after the vector");
                }
                entries.emplace_back(std::move(v), parse_rational(rest.substr(1)));
            }
            return VectorLaw::joint(std::move(entries));
        }
        if (name == "product")
        {
            std::vector<IncrementLaw> coords;
            std::string_view rest = body;
            while (!(rest = trim(rest)).empty())
            {
                if (rest.front() == 'x' && (rest.size() == 1 || std::isspace(static_cast<unsigned char>(rest[1]))))
                {
                    rest.remove_prefix(1);
                    continue;
                }
                const auto close = rest.find('}');
                if (close == std::string_view::npos)
                {
                    throw std::invalid_argument("unterminated block inside product{}");
                }
                const auto [n, b] = block(rest.substr(0, close + 1));
                coords.push_back(parse_scalar_law(n, b));
                rest.remove_prefix(close + 1);
            }
            return VectorLaw::product(std::move(coords));
        }
        return parse_scalar_law(name, body);
    }

    const std::vector<std::string>& config_keys()
    {
        static const std::vector<std::string> keys = {
            "arithmetic",  "backward_runs", "backward_steps", "bound",     "experiment",        "fold",
            "format",      "forward_n",     "green_K",        "horizon",   "ladder",            "law",
            "law1",        "law2",          "law_s",          "law_z",     "oracle_n",          "out",
            "recurrence_growth", "replicas", "roles",         "seed",      "start_level",       "threads",
            "transience_growth", "x_max",   "x_min",
        };
        return keys;
    }

    void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& raw, int line)
    {
        const std::string_view value = trim(raw);
        auto scalar_law = [&](std::optional<IncrementLaw>& slot) {
            LawSpec s = parse_law(value);
            if (!std::holds_alternative<IncrementLaw>(s))
            {
                throw std::invalid_argument(key + " must be a one-dimensional law");
            }
            slot = std::get<IncrementLaw>(std::move(s));
        };
        auto positive = [&](std::int64_t v) {
            if (v < 1)
            {
                throw std::invalid_argument(key + " must be >= 1");
            }
            return v;
        };
        try
        {
            if (key == "experiment")
            {
                const auto k = parse_experiment_kind(value);
                if (!k)
                {
                    throw std::invalid_argument("unknown experiment '" + std::string(value) + "'");
                }
                cfg.kind = *k;
            }
            else if (key == "seed")
            {
                cfg.seed = parse_uint(value);
            }
            else if (key == "replicas")
            {
                cfg.replicas = positive(parse_int(value));
            }
            else if (key == "horizon")
            {
                cfg.horizon = positive(parse_int(value));
            }
            else if (key == "threads")
            {
                cfg.threads = static_cast<unsigned>(parse_uint(value));
            }
            else if (key == "format")
            {
                if (value == "csv")
                {
                    cfg.format = OutputFormat::Csv;
                }
                else if (value == "json")
                {
                    cfg.format = OutputFormat::Json;
                }
                else
                {
                    throw std::invalid_argument("format must be csv or json");
                }
            }
            else if (key == "out")
            {
                if (value.empty())
                {
                    throw std::invalid_argument("out must not be empty");
                }
                cfg.out = std::string(value);
            }
            else if (key == "law")
            {
                cfg.law = parse_law(value);
            }
            else if (key == "law1")
            {
                scalar_law(cfg.law1);
            }
            else if (key == "law2")
            {
                scalar_law(cfg.law2);
            }
            else if (key == "law_s")
            {
                scalar_law(cfg.law_s);
            }
            else if (key == "law_z")
            {
                scalar_law(cfg.law_z);
            }
            else if (key == "roles")
            {
                const auto parts = split_top(value, ',');
                if (parts.size() != 2)
                {
                    throw std::invalid_argument("roles needs two entries");
                }
                for (std::size_t i = 0; i < 2; ++i)
                {
                    if (parts[i] == "lindley")
                    {
                        cfg.roles[i] = CoordinateRole::Lindley;
                    }
                    else if (parts[i] == "walk")
                    {
                        cfg.roles[i] = CoordinateRole::Walk;
                    }
                    else
                    {
                        throw std::invalid_argument("role must be lindley or walk, got '" + std::string(parts[i]) + "'");
                    }
                }
            }
            else if (key == "ladder")
            {
                if (value == "strict")
                {
                    cfg.ladder = LadderKind::StrictAscending;
                }
                else if (value == "weak")
                {
                    cfg.ladder = LadderKind::WeakAscending;
                }
                else
                {
                    throw std::invalid_argument("ladder must be strict or weak");
                }
            }
            else if (key == "arithmetic")
            {
                if (value == "rational")
                {
                    cfg.rational = true;
                }
                else if (value == "float")
                {
                    cfg.rational = false;
                }
                else
                {
                    throw std::invalid_argument("arithmetic must be rational or float");
                }
            }
            else if (key == "x_min")
            {
                cfg.x_min = parse_int(value);
            }
            else if (key == "x_max")
            {
                cfg.x_max = parse_int(value);
            }
            else if (key == "fold")
            {
                cfg.fold = parse_bool(value);
            }
            else if (key == "oracle_n")
            {
                cfg.oracle_n = parse_int(value);
            }
            else if (key == "start_level")
            {
                cfg.start_level = positive(parse_int(value));
            }
            else if (key == "bound")
            {
                cfg.bound = positive(parse_int(value));
            }
            else if (key == "forward_n")
            {
                cfg.forward_n = parse_int(value);
            }
            else if (key == "backward_runs")
            {
                cfg.backward_runs = parse_int(value);
            }
            else if (key == "backward_steps")
            {
                cfg.backward_steps = positive(parse_int(value));
            }
            else if (key == "green_K")
            {
                cfg.green_K = parse_int(value);
            }
            else if (key == "recurrence_growth")
            {
                cfg.recurrence_growth = parse_double(value);
            }
            else if (key == "transience_growth")
            {
                cfg.transience_growth = parse_double(value);
            }
            else
            {
                throw ConfigError(line, "unknown key '" + key + "'");
            }
        }
        catch (const ConfigError&)
        {
            throw;
        }
        catch (const std::exception& e)
        {
            throw ConfigError(line, key + ": " + e.what());
        }
    }

    ExperimentConfig parse_config(std::string_view text)
    {
        ExperimentConfig cfg;
        std::map<std::string, int> seen;
        std::istringstream in{std::string(text)};
        std::string raw;
        int lineno = 0;
        while (std::getline(in, raw))
        {
            ++lineno;
            std::string line = raw.substr(0, raw.find('#'));
            if (trim(line).empty())
            {
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos)
            {
                throw ConfigError(lineno, "expected 'key = value'");
            }
            const std::string key(trim(std::string_view(line).substr(0, eq)));
            std::string value(trim(std::string_view(line).substr(eq + 1)));
            if (key.empty())
            {
                throw ConfigError(lineno, "empty key");
            }
            const int start = lineno;
            int depth = 0;
            for (char c : value)
            {
                depth += (c == '{') - (c == '}');
            }
            while (depth > 0)
            {
                if (!std::getline(in, raw))
                {
                    throw ConfigError(start, "unterminated block for '" + key + "'");
                }
                ++lineno;
                const std::string more = raw.substr(0, raw.find('#'));
                for (char c : more)
                {
                    depth += (c == '{') - (c == '}');
                }
                value += " " + more;
            }
            if (depth < 0)
            {
                throw ConfigError(start, "unbalanced '}' in '" + key + "'");
            }
            if (!std::binary_search(config_keys().begin(), config_keys().end(), key))
            {
                throw ConfigError(start, "unknown key '" + key + "'");
            }
            if (auto [it, fresh] = seen.emplace(key, start); !fresh)
            {
                throw ConfigError(start, "key '" + key + "' already set on line " + std::to_string(it->second));
            }
            set_config_value(cfg, key, squash(value), start);
        }
        return cfg;
    }

    ExperimentConfig load_config(const std::string& path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
        {
            throw ConfigError(0, "cannot open config '" + path + "'");
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse_config(ss.str());
    }

    std::vector<std::pair<std::string, std::string>> ExperimentConfig::canonical() const
    {
        std::vector<std::pair<std::string, std::string>> kv;
        auto add = [&](const std::string& k, std::string v) { kv.emplace_back(k, std::move(v)); };
        add("arithmetic", rational ? "rational" : "float");
        add("backward_runs", std::to_string(backward_runs));
        add("backward_steps", std::to_string(backward_steps));
        add("bound", std::to_string(bound));
        add("experiment", to_string(kind));
        add("fold", fold ? "true" : "false");
        add("format", format == OutputFormat::Csv ? "csv" : "json");
        add("forward_n", std::to_string(forward_n));
        add("green_K", std::to_string(green_K));
        add("horizon", std::to_string(horizon));
        add("ladder", ladder == LadderKind::StrictAscending ? "strict" : "weak");
        add("law", law ? describe_spec(*law) : "");
        add("law1", law1 ? law1->describe() : "");
        add("law2", law2 ? law2->describe() : "");
        add("law_s", law_s ? law_s->describe() : "");
        add("law_z", law_z ? law_z->describe() : "");
        add("oracle_n", std::to_string(oracle_n));
        add("recurrence_growth", fmt_double(recurrence_growth));
        add("replicas", std::to_string(replicas));
        add("roles", std::string(to_string(roles[0])) + "," + to_string(roles[1]));
        add("seed", seed ? std::to_string(*seed) : "");
        add("start_level", std::to_string(start_level));
        add("transience_growth", fmt_double(transience_growth));
        add("x_max", std::to_string(x_max));
        add("x_min", std::to_string(x_min));
        return kv;
    }

    std::uint64_t ExperimentConfig::hash() const
    {
        std::string s;
        for (const auto& [k, v] : canonical())
        {
            s += k;
            s += '=';
            s += v;
            s += '\n';
        }
        return fnv1a64(s);
    }
}
