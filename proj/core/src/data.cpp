#include "iplna/data.hpp"

#include "iplna/rng.hpp"
#include "kv_parse.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <stdexcept>
#include <utility>

namespace iplna {

namespace {

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= line.size()) {
        const std::size_t comma = line.find(',', start);
        out.push_back(line.substr(start, comma == std::string::npos ? std::string::npos
                                                                    : comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

std::vector<Sample> ingest_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("csv '" + path + "': cannot open for reading");

    std::string line;
    if (!std::getline(in, line))
        throw std::invalid_argument("csv '" + path + "': missing header row");
    strip_cr(line);

    const std::vector<std::string> header = split_commas(line);
    if (header.size() < 2 || header.back() != "y")
        throw std::invalid_argument("csv '" + path +
                                    "': header must be x1,...,xn,y with n >= 1");
    const std::size_t n = header.size() - 1;
    for (std::size_t i = 0; i < n; ++i) {
        if (header[i] != "x" + std::to_string(i + 1))
            throw std::invalid_argument("csv '" + path + "': header column " +
                                        std::to_string(i + 1) + " must be x" +
                                        std::to_string(i + 1) + ", got '" + header[i] + "'");
    }

    std::vector<Sample> samples;
    long lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (line.empty()) continue;
        const std::string where = "csv '" + path + "' line " + std::to_string(lineno);
        const std::vector<std::string> tokens = split_commas(line);
        if (tokens.size() != header.size())
            throw std::invalid_argument(where + ": expected " +
                                        std::to_string(header.size()) + " values, got " +
                                        std::to_string(tokens.size()));
        Sample s;
        s.x = Vec(n);
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            const double v = detail::parse_double(where, header[i], tokens[i]);
            if (!std::isfinite(v))
                throw std::invalid_argument(where + ": non-finite value for '" + header[i] +
                                            "'");
            if (i < n)
                s.x(static_cast<Eigen::Index>(i)) = v;
            else
                s.y = v;
        }
        samples.push_back(std::move(s));
    }
    return samples;
}

void write_csv(const std::string& path, std::size_t dim,
               const std::vector<Sample>& samples) {
    if (dim == 0) throw std::invalid_argument("write_csv: dim must be >= 1");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("csv '" + path + "': cannot open for writing");

    for (std::size_t i = 0; i < dim; ++i) out << "x" << (i + 1) << ",";
    out << "y\n";

    char buf[40];
    for (const Sample& s : samples) {
        if (static_cast<std::size_t>(s.x.size()) != dim)
            throw std::invalid_argument("write_csv: sample dimension mismatch");
        for (Eigen::Index i = 0; i < s.x.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", s.x(i));
            out << buf << ",";
        }
        std::snprintf(buf, sizeof buf, "%.17g", s.y);
        out << buf << "\n";
    }
    if (!out) throw std::runtime_error("csv '" + path + "': write failed");
}

void SyntheticSpec::validate() const {
    if (dim < 1) throw std::invalid_argument("synthetic spec: dim must be >= 1");
    if (!(amp > 0.0)) throw std::invalid_argument("synthetic spec: amp must be > 0");
    if (!(noise_std >= 0.0))
        throw std::invalid_argument("synthetic spec: noise must be >= 0");
    if (order < 0) throw std::invalid_argument("synthetic spec: order must be >= 0");
    if (true_w.size() > 0) ensure_finite(true_w, "synthetic spec w");
    if (kind == SynthKind::divergence_probe) {
        if (!(target >= 0.0) || !std::isfinite(target))
            throw std::invalid_argument("synthetic spec: target must be finite and >= 0");
        if (probe_dir.size() > 0) {
            ensure_finite(probe_dir, "synthetic spec dir");
            if (static_cast<std::size_t>(probe_dir.size()) != dim)
                throw std::invalid_argument("synthetic spec: dir length must equal dim");
            if (probe_dir.norm() == 0.0)
                throw std::invalid_argument("synthetic spec: dir must be nonzero");
        }
    }
}

namespace {

Vec vec_from(const std::vector<double>& v) {
    Vec out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
    return out;
}

std::size_t take_dim(detail::FieldReader& fields, const std::string& what) {
    const long d = fields.take_long("dim");
    if (d < 1) throw detail::spec_error(what, "dim must be >= 1");
    return static_cast<std::size_t>(d);
}

void take_plant_fields(detail::FieldReader& fields, SyntheticSpec& s) {
    s.noise_std = fields.take_double_or("noise", 0.0);
    s.amp = fields.take_double_or("amp", 1.0);
    if (fields.has("w")) s.true_w = vec_from(fields.take_double_list("w"));
    s.wseed = fields.take_u64_or("wseed", 1);
}

}  // namespace

SyntheticSpec parse_synth(const std::string& spec) {
    const auto [head, rest] = detail::split_head(spec, ',');
    SyntheticSpec s;
    if (head == "linear") {
        detail::FieldReader fields("synthetic spec 'linear'", rest);
        s.kind = SynthKind::linear_plant;
        s.dim = take_dim(fields, "synthetic spec 'linear'");
        take_plant_fields(fields, s);
        fields.finish();
    } else if (head == "poly") {
        detail::FieldReader fields("synthetic spec 'poly'", rest);
        s.kind = SynthKind::polynomial_plant;
        s.dim = take_dim(fields, "synthetic spec 'poly'");
        const long order = fields.take_long("order");
        if (order < 0) throw detail::spec_error("synthetic spec 'poly'", "order must be >= 0");
        s.order = static_cast<int>(order);
        take_plant_fields(fields, s);
        fields.finish();
    } else if (head == "probe") {
        detail::FieldReader fields("synthetic spec 'probe'", rest);
        s.kind = SynthKind::divergence_probe;
        s.target = fields.take_double_or("target", 2.5);
        if (fields.has("dir")) s.probe_dir = vec_from(fields.take_double_list("dir"));
        const long fallback = s.probe_dir.size() > 0 ? s.probe_dir.size() : 1;
        const long d = fields.take_long_or("dim", fallback);
        if (d < 1) throw detail::spec_error("synthetic spec 'probe'", "dim must be >= 1");
        s.dim = static_cast<std::size_t>(d);
        fields.finish();
    } else {
        throw std::invalid_argument("synthetic spec: unknown kind '" + head +
                                    "' (expected linear, poly, or probe)");
    }
    s.validate();
    return s;
}

namespace {

Vec resolve_true_w(const SyntheticSpec& spec, std::size_t out_dim) {
    if (spec.true_w.size() > 0) {
        if (static_cast<std::size_t>(spec.true_w.size()) != out_dim)
            throw std::invalid_argument(
                "synthetic spec: w has length " + std::to_string(spec.true_w.size()) +
                " but the plant's feature map has dimension " + std::to_string(out_dim));
        return spec.true_w;
    }
    std::mt19937_64 gen(spec.wseed);
    Vec w(static_cast<Eigen::Index>(out_dim));
    for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = rng::symmetric_uniform(gen);
    return w;
}

GeneratedData generate_plant(const SyntheticSpec& spec, const FeatureMap& map,
                             std::uint64_t seed, long steps) {
    GeneratedData out;
    out.true_w = resolve_true_w(spec, map.output_dim());
    out.samples.reserve(static_cast<std::size_t>(steps));
    std::mt19937_64 gen(seed);
    for (long k = 0; k < steps; ++k) {
        Sample s;
        s.x = Vec(static_cast<Eigen::Index>(spec.dim));
        for (Eigen::Index i = 0; i < s.x.size(); ++i) s.x(i) = rng::uniform(gen, spec.amp);
        s.y = out.true_w.dot(map(s.x));
        if (spec.noise_std > 0.0) s.y += spec.noise_std * rng::gaussian(gen);
        out.samples.push_back(std::move(s));
    }
    return out;
}

GeneratedData generate_probe(const SyntheticSpec& spec, long steps) {
    Vec dir = spec.probe_dir.size() > 0
                  ? spec.probe_dir
                  : Vec(Vec::Ones(static_cast<Eigen::Index>(spec.dim)));
    const Vec x = dir / dir.norm() * std::sqrt(spec.target);
    GeneratedData out;
    out.samples.assign(static_cast<std::size_t>(steps), Sample{x, 1.0});
    return out;
}

}  // namespace

GeneratedData generate(const SyntheticSpec& spec, const FeatureMap& map,
                       std::uint64_t seed, long steps) {
    spec.validate();
    if (steps < 1) throw std::invalid_argument("generate: steps must be >= 1");

    switch (spec.kind) {
        case SynthKind::linear_plant: {
            if (map.input_dim() != spec.dim)
                throw std::invalid_argument(
                    "synthetic linear plant: architecture expects input dimension " +
                    std::to_string(map.input_dim()) + " but spec has dim=" +
                    std::to_string(spec.dim));
            return generate_plant(spec, map, seed, steps);
        }
        case SynthKind::polynomial_plant: {
            PolynomialSpec ps;
            ps.order = spec.order;
            ps.input_dim = spec.dim;
            ps.include_bias = true;
            return generate_plant(spec, FeatureMap::polynomial(ps), seed, steps);
        }
        case SynthKind::divergence_probe:
            return generate_probe(spec, steps);
    }
    throw std::logic_error("generate: unknown synthetic kind");
}

}  // namespace iplna
