#include "palearn/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "palearn/errors.hpp"

namespace palearn {

namespace {

std::vector<std::vector<double>> make_class_centers(const CohortSpec& spec, Rng& rng) {
    const std::size_t c_count = static_cast<std::size_t>(spec.num_classes);
    std::vector<std::vector<double>> centers(c_count, std::vector<double>(spec.feature_dim, 0.0));
    if (c_count <= spec.feature_dim) {
        for (std::size_t c = 0; c < c_count; ++c) centers[c][c] = spec.class_separation;
    } else {
        // more classes than axes: random unit directions
        for (std::size_t c = 0; c < c_count; ++c) {
            double norm = 0.0;
            for (std::size_t d = 0; d < spec.feature_dim; ++d) {
                centers[c][d] = rng.normal();
                norm += centers[c][d] * centers[c][d];
            }
            norm = std::sqrt(norm);
            for (double& v : centers[c]) v = v / norm * spec.class_separation;
        }
    }
    return centers;
}

// Truncated discrete power law P(s) proportional to s^(-alpha) on
// [min, max]; larger alpha concentrates mass at the minimum.
std::vector<double> size_distribution(const CohortSpec& spec) {
    std::vector<double> weights;
    for (int s = spec.min_samples_per_patient; s <= spec.max_samples_per_patient; ++s)
        weights.push_back(std::pow(static_cast<double>(s), -spec.size_alpha));
    return weights;
}

}  // namespace

void validate_cohort_spec(const CohortSpec& spec) {
    if (spec.num_classes < 2) throw SpecError("num_classes must be >= 2");
    if (spec.num_patients < spec.num_classes)
        throw SpecError("num_patients must be >= num_classes");
    if (spec.num_patients < 2 * spec.num_classes)
        throw SpecError("infeasible spec: patient-disjoint train/test covering every class needs "
                        "at least 2 patients per class");
    if (spec.feature_dim < 1) throw SpecError("feature_dim must be >= 1");
    if (spec.min_samples_per_patient < 1) throw SpecError("min_samples_per_patient must be >= 1");
    if (spec.max_samples_per_patient < spec.min_samples_per_patient)
        throw SpecError("max_samples_per_patient must be >= min_samples_per_patient");
    if (!(spec.class_separation >= 0.0)) throw SpecError("class_separation must be >= 0");
    if (!(spec.patient_offset_scale >= 0.0)) throw SpecError("patient_offset_scale must be >= 0");
    if (!(spec.noise_scale >= 0.0)) throw SpecError("noise_scale must be >= 0");
    if (!(spec.size_alpha > 0.0)) throw SpecError("size_alpha must be > 0");
    if (!(spec.test_patient_fraction > 0.0 && spec.test_patient_fraction < 1.0))
        throw SpecError("test_patient_fraction must be in (0, 1)");
    if (!spec.class_weights.empty()) {
        if (spec.class_weights.size() != static_cast<std::size_t>(spec.num_classes))
            throw SpecError("class_weights must have num_classes entries");
        double total = 0.0;
        for (double w : spec.class_weights) {
            if (!(w >= 0.0)) throw SpecError("class_weights must be non-negative");
            total += w;
        }
        if (!(total > 0.0)) throw SpecError("class_weights must not all be zero");
    }
}

Cohort generate_cohort(const CohortSpec& spec, Rng& rng) {
    validate_cohort_spec(spec);
    const int n_patients = spec.num_patients;
    const int n_classes = spec.num_classes;

    const std::vector<std::vector<double>> centers = make_class_centers(spec, rng);

    // class per patient: the first 2C patients guarantee two per class, the
    // rest follow class_weights
    std::vector<double> weights = spec.class_weights;
    if (weights.empty()) weights.assign(static_cast<std::size_t>(n_classes), 1.0);
    std::vector<int> patient_class(static_cast<std::size_t>(n_patients));
    for (int i = 0; i < n_patients; ++i) {
        if (i < 2 * n_classes)
            patient_class[static_cast<std::size_t>(i)] = i % n_classes;
        else
            patient_class[static_cast<std::size_t>(i)] = static_cast<int>(rng.discrete(weights));
    }

    std::vector<std::vector<double>> patient_offset(static_cast<std::size_t>(n_patients));
    for (auto& offset : patient_offset) {
        offset.resize(spec.feature_dim);
        for (double& v : offset) v = spec.patient_offset_scale * rng.normal();
    }

    const std::vector<double> size_weights = size_distribution(spec);
    std::vector<int> patient_size(static_cast<std::size_t>(n_patients));
    for (int& s : patient_size)
        s = spec.min_samples_per_patient + static_cast<int>(rng.discrete(size_weights));

    // stratified test reservation: per class at least one patient, never all
    std::vector<bool> is_test(static_cast<std::size_t>(n_patients), false);
    for (int c = 0; c < n_classes; ++c) {
        std::vector<int> members;
        for (int i = 0; i < n_patients; ++i)
            if (patient_class[static_cast<std::size_t>(i)] == c) members.push_back(i);
        const long want = std::lround(spec.test_patient_fraction * static_cast<double>(members.size()));
        const std::size_t take = static_cast<std::size_t>(
            std::clamp<long>(want, 1, static_cast<long>(members.size()) - 1));
        for (int p : rng.sample_without_replacement(members, take))
            is_test[static_cast<std::size_t>(p)] = true;
    }

    Cohort cohort;
    cohort.train.num_classes = n_classes;
    cohort.train.feature_dim = spec.feature_dim;
    cohort.test.num_classes = n_classes;
    cohort.test.feature_dim = spec.feature_dim;

    for (int p = 0; p < n_patients; ++p) {
        Dataset& target = is_test[static_cast<std::size_t>(p)] ? cohort.test : cohort.train;
        const int label = patient_class[static_cast<std::size_t>(p)];
        const std::vector<double>& center = centers[static_cast<std::size_t>(label)];
        const std::vector<double>& offset = patient_offset[static_cast<std::size_t>(p)];
        for (int j = 0; j < patient_size[static_cast<std::size_t>(p)]; ++j) {
            Sample s;
            s.id = static_cast<int>(target.samples.size());
            s.patient_id = p;
            s.label = label;
            s.features.resize(spec.feature_dim);
            for (std::size_t d = 0; d < spec.feature_dim; ++d)
                s.features[d] = center[d] + offset[d] + spec.noise_scale * rng.normal();
            target.samples.push_back(std::move(s));
        }
    }

    validate_dataset(cohort.train);
    validate_dataset(cohort.test);
    return cohort;
}

Cohort generate_cohort(const CohortSpec& spec) {
    Rng rng(spec.seed);
    return generate_cohort(spec, rng);
}

void write_dataset_csv(const Dataset& ds, const std::string& path) {
    validate_dataset(ds);
    std::ofstream out(path, std::ios::binary);  // binary keeps LF endings everywhere
    if (!out) throw ParseError("cannot open '" + path + "' for writing");

    out << "sample_id,patient_id,label";
    for (std::size_t d = 0; d < ds.feature_dim; ++d) out << ",f" << d;
    out << "\n";

    char buf[40];
    for (const Sample& s : ds.samples) {
        out << s.id << ',' << s.patient_id << ',' << s.label;
        for (double f : s.features) {
            std::snprintf(buf, sizeof buf, "%.17g", f);
            out << ',' << buf;
        }
        out << "\n";
    }
    if (!out) throw ParseError("write failed for '" + path + "'");
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string::size_type start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        if (pos == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

long parse_int(const std::string& s, std::size_t line_no, const char* what) {
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (s.empty() || end != s.c_str() + s.size())
        throw ParseError(std::string("invalid ") + what + " '" + s + "'", line_no);
    return v;
}

double parse_double(const std::string& s, std::size_t line_no) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size())
        throw ParseError("invalid feature value '" + s + "'", line_no);
    return v;
}

}  // namespace

Dataset load_dataset_csv(const std::string& path, int expected_classes) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty file '" + path + "'", 1);
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const std::vector<std::string> header = split_csv_line(line);
    if (header.size() < 4 || header[0] != "sample_id" || header[1] != "patient_id" ||
        header[2] != "label")
        throw ParseError("unknown header, expected sample_id,patient_id,label,f0,...", 1);
    for (std::size_t d = 3; d < header.size(); ++d)
        if (header[d] != "f" + std::to_string(d - 3))
            throw ParseError("unknown header column '" + header[d] + "'", 1);
    const std::size_t feature_dim = header.size() - 3;

    Dataset ds;
    ds.feature_dim = feature_dim;
    int max_label = -1;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != feature_dim + 3)
            throw ParseError("expected " + std::to_string(feature_dim + 3) + " fields, got " +
                             std::to_string(fields.size()), line_no);
        Sample s;
        s.id = static_cast<int>(parse_int(fields[0], line_no, "sample_id"));
        s.patient_id = static_cast<int>(parse_int(fields[1], line_no, "patient_id"));
        s.label = static_cast<int>(parse_int(fields[2], line_no, "label"));
        if (s.id != static_cast<int>(ds.samples.size()))
            throw ParseError("sample_id " + std::to_string(s.id) + " out of order, expected " +
                             std::to_string(ds.samples.size()), line_no);
        if (s.label < 0) throw ParseError("negative label", line_no);
        if (expected_classes > 0 && s.label >= expected_classes)
            throw ParseError("label " + std::to_string(s.label) + " >= num_classes " +
                             std::to_string(expected_classes), line_no);
        max_label = std::max(max_label, s.label);
        s.features.reserve(feature_dim);
        for (std::size_t d = 0; d < feature_dim; ++d) {
            const double f = parse_double(fields[3 + d], line_no);
            if (!std::isfinite(f)) throw ParseError("non-finite feature", line_no);
            s.features.push_back(f);
        }
        ds.samples.push_back(std::move(s));
    }

    ds.num_classes = expected_classes > 0 ? expected_classes : max_label + 1;
    try {
        validate_dataset(ds);
    } catch (const InvalidInputError& e) {
        throw ParseError(std::string("'") + path + "': " + e.what());
    }
    return ds;
}

}  // namespace palearn
