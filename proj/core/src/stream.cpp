#include "hhh/stream.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace hhh {

namespace {

[[noreturn]] void line_error(std::size_t line, const std::string& msg) {
    throw std::runtime_error("line " + std::to_string(line) + ": " + msg);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            out.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    out.push_back(field);
    for (std::string& f : out) {
        while (!f.empty() && f.front() == ' ') f.erase(f.begin());
        while (!f.empty() && f.back() == ' ') f.pop_back();
    }
    return out;
}

}  // namespace

std::vector<TraceRecord> parse_trace(std::istream& in, const HierarchySpec& spec,
                                     TraceFormat format) {
    if (format == TraceFormat::csv2d && spec.dimensions() != 2) {
        throw std::invalid_argument("csv2d requires a two-dimensional hierarchy");
    }
    const std::size_t d = spec.dimensions();
    std::vector<TraceRecord> records;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> fields = split_csv(line);
        if (fields.size() != d && fields.size() != d + 1) {
            line_error(lineno, "expected " + std::to_string(d) + " values and an optional count");
        }
        TraceRecord rec;
        for (std::size_t i = 0; i < d; ++i) {
            try {
                rec.values[i] = parse_dimension_value(spec, i, fields[i]);
            } catch (const std::exception& e) {
                line_error(lineno, e.what());
            }
        }
        if (fields.size() == d + 1) {
            const std::string& cf = fields[d];
            if (cf.empty() || cf.find_first_not_of("0123456789") != std::string::npos) {
                line_error(lineno, "malformed count: " + cf);
            }
            try {
                rec.count = std::stoull(cf);
            } catch (const std::exception&) {
                line_error(lineno, "malformed count: " + cf);
            }
            if (rec.count == 0) line_error(lineno, "count must be positive");
        }
        records.push_back(rec);
    }
    return records;
}

std::vector<TraceRecord> parse_trace_file(const std::string& path, const HierarchySpec& spec,
                                          TraceFormat format) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trace file: " + path);
    return parse_trace(in, spec, format);
}

std::string format_trace(std::span<const TraceRecord> records, const HierarchySpec& spec) {
    auto dim_text = [&spec](std::size_t i, uint32_t v) {
        const DimensionSpec& d = spec.dim(i);
        if (d.height == 4 && d.step_bits == 8) {
            return std::to_string(v >> 24) + "." + std::to_string((v >> 16) & 0xff) + "." +
                   std::to_string((v >> 8) & 0xff) + "." + std::to_string(v & 0xff);
        }
        return std::to_string(v);
    };
    std::string out;
    for (const TraceRecord& r : records) {
        for (std::size_t i = 0; i < spec.dimensions(); ++i) {
            if (i) out += ',';
            out += dim_text(i, r.values[i]);
        }
        out += ',' + std::to_string(r.count) + '\n';
    }
    return out;
}

Prefix record_element(const HierarchySpec& spec, const TraceRecord& record) {
    return make_element(spec, std::span<const uint32_t>(record.values.data(), spec.dimensions()));
}

void insert_stream(HhhState& state, std::span<const TraceRecord> records) {
    for (const TraceRecord& r : records) {
        state.insert(record_element(state.spec(), r), r.count);
    }
}

namespace {

/// Deterministic uniform double in [0, 1) from a 64-bit draw.
double unit_double(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

class ZipfSampler {
public:
    ZipfSampler(uint64_t universe, double alpha) {
        cdf_.reserve(universe);
        double acc = 0.0;
        for (uint64_t k = 1; k <= universe; ++k) {
            acc += 1.0 / std::pow(static_cast<double>(k), alpha);
            cdf_.push_back(acc);
        }
        for (double& v : cdf_) v /= acc;
    }

    /// 0-based rank.
    uint64_t draw(std::mt19937_64& rng) const {
        double u = unit_double(rng);
        auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
        if (it == cdf_.end()) --it;
        return static_cast<uint64_t>(it - cdf_.begin());
    }

private:
    std::vector<double> cdf_;
};

/// Bijection on [0, universe) scattering consecutive ranks across the value
/// space (and therefore across prefixes). 2654435761 is odd and prime, so it
/// is invertible modulo any universe below it.
uint64_t scatter(uint64_t rank, uint64_t universe) {
    return (rank * 2654435761ull) % universe;
}

}  // namespace

std::vector<TraceRecord> generate_stream(const GeneratorConfig& config,
                                         const HierarchySpec& spec) {
    if (config.universe < 1 || config.universe > (1ull << 20)) {
        throw std::invalid_argument("generator universe must be in [1, 2^20]");
    }
    for (std::size_t i = 0; i < spec.dimensions(); ++i) {
        uint64_t width = spec.dim(i).width_bits();
        uint64_t space = width >= 64 ? UINT64_MAX : (1ull << width);
        if (config.universe > space) {
            throw std::invalid_argument("generator universe exceeds dimension width");
        }
    }
    if (config.kind == GeneratorConfig::Kind::zipf && config.alpha <= 0) {
        throw std::invalid_argument("zipf alpha must be positive");
    }

    std::mt19937_64 rng(config.seed);
    std::vector<TraceRecord> out;
    out.reserve(config.records);
    const std::size_t d = spec.dimensions();

    switch (config.kind) {
        case GeneratorConfig::Kind::zipf: {
            ZipfSampler sampler(config.universe, config.alpha);
            for (uint64_t n = 0; n < config.records; ++n) {
                TraceRecord rec;
                for (std::size_t i = 0; i < d; ++i) {
                    rec.values[i] =
                        static_cast<uint32_t>(scatter(sampler.draw(rng), config.universe));
                }
                out.push_back(rec);
            }
            break;
        }
        case GeneratorConfig::Kind::uniform: {
            for (uint64_t n = 0; n < config.records; ++n) {
                TraceRecord rec;
                for (std::size_t i = 0; i < d; ++i) {
                    rec.values[i] = static_cast<uint32_t>(rng() % config.universe);
                }
                out.push_back(rec);
            }
            break;
        }
        case GeneratorConfig::Kind::few_heavy: {
            // a handful of hot elements taking ~2/3 of the stream, the rest
            // uniform noise; hot elements share high-order prefix structure
            // to stress the discounting logic
            uint32_t hot = std::max<uint32_t>(1, config.heavy_items);
            std::vector<TraceRecord> heavies;
            TraceRecord base;
            for (std::size_t i = 0; i < d; ++i) {
                base.values[i] = static_cast<uint32_t>(rng() % config.universe);
            }
            for (uint32_t h = 0; h < hot; ++h) {
                TraceRecord rec = base;
                // perturb low-order bits so heavies cluster under shared prefixes
                rec.values[h % d] =
                    static_cast<uint32_t>((base.values[h % d] + h) % config.universe);
                heavies.push_back(rec);
            }
            for (uint64_t n = 0; n < config.records; ++n) {
                if (unit_double(rng) < 2.0 / 3.0) {
                    out.push_back(heavies[rng() % heavies.size()]);
                } else {
                    TraceRecord rec;
                    for (std::size_t i = 0; i < d; ++i) {
                        rec.values[i] = static_cast<uint32_t>(rng() % config.universe);
                    }
                    out.push_back(rec);
                }
            }
            break;
        }
    }
    return out;
}

OccupancyStats occupancy_stats(const HhhState& state) {
    OccupancyStats stats;
    stats.capacity_per_node = state.node_capacity();
    const Rational& eps = state.epsilon();
    for (uint64_t i = 0; i < state.spec().node_count(); ++i) {
        uint64_t heavy = 0;
        for (const CounterSnapshot& c : state.summary(i).counters()) {
            if (!eps.le_mul(c.count, state.total())) ++heavy;  // f_max > eps*N
        }
        stats.heavy_counters_per_node.push_back(heavy);
        stats.max_heavy_counters = std::max(stats.max_heavy_counters, heavy);
    }
    return stats;
}

}  // namespace hhh
