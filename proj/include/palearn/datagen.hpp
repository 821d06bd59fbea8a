#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "palearn/pool.hpp"
#include "palearn/rng.hpp"

namespace palearn {

// Parameters of a synthetic patient cohort. Every patient carries one class
// and one offset vector, so a disease "looks different" across patients while
// staying consistent within one; cohort sizes follow a truncated power law.
struct CohortSpec {
    int num_classes = 3;
    int num_patients = 60;
    std::size_t feature_dim = 8;
    double class_separation = 4.0;     // distance scale between class centers
    double patient_offset_scale = 1.0; // sigma_p, per-patient manifestation shift
    double noise_scale = 0.5;          // sigma_n, per-sample noise
    double size_alpha = 1.5;           // power-law exponent for patient sample counts
    int min_samples_per_patient = 2;
    int max_samples_per_patient = 12;
    double test_patient_fraction = 0.25;
    std::uint64_t seed = 1;
    // Relative patient counts per class; empty = uniform. Skewing these skews
    // the class totals, mimicking heavily imbalanced cohorts.
    std::vector<double> class_weights;
};

// Throws SpecError when the cohort parameters are invalid or cannot yield
// patient-disjoint train/test sets that both cover every class (needs >= 2
// patients per class).
void validate_cohort_spec(const CohortSpec& spec);

struct Cohort {
    Dataset train;
    Dataset test;
};

// Patient-disjoint train/test datasets; the test side reserves a stratified
// fraction of patients (at least one per class, never a whole class).
Cohort generate_cohort(const CohortSpec& spec, Rng& rng);

// Convenience overload seeding the rng from spec.seed.
Cohort generate_cohort(const CohortSpec& spec);

// CSV schema: header "sample_id,patient_id,label,f0,...,f{D-1}", UTF-8, LF
// endings, features in full-precision decimal so round-trips are exact.
void write_dataset_csv(const Dataset& ds, const std::string& path);

// expected_classes = 0 infers the class count as max label + 1.
// Throws ParseError (with line number) on malformed input.
Dataset load_dataset_csv(const std::string& path, int expected_classes = 0);

}  // namespace palearn
