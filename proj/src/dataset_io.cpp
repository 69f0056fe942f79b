#include "cosched/dataset_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <sstream>

#include "cosched/csv.hpp"
#include "cosched/error.hpp"

namespace cosched {

void write_dataset_csv(const std::string& path, const DatasetFile& dataset) {
    std::ostringstream out;
    char buf[128];
    std::snprintf(buf, sizeof(buf), "# cosched dataset v1; profiles=fnv1a:%016" PRIx64 "; colocations=fnv1a:%016" PRIx64,
                  dataset.profiles_hash, dataset.colocations_hash);
    out << buf << "\n";
    out << "# feature_set=" << dataset.feature_set.to_string() << "\n";
    out << "# clamped_rows=" << dataset.clamped_rows << "\n";
    out << "primary_id,interfering_id,degradation_pct";
    for (const auto& name : dataset.feature_set.feature_names()) out << ',' << name;
    out << "\n";
    const std::size_t want = static_cast<std::size_t>(dataset.feature_set.feature_length());
    for (const auto& s : dataset.samples) {
        if (s.features.size() != want)
            fail("inconsistent_features", "sample (" + s.primary_id + "," + s.interfering_id +
                                              ") does not match the declared feature set");
        out << s.primary_id << ',' << s.interfering_id << ',' << fmt_double(s.degradation);
        for (double f : s.features) out << ',' << fmt_double(f);
        out << "\n";
    }
    write_text_file(path, out.str());
}

DatasetFile load_dataset_csv(const std::string& path) {
    CsvFile csv = read_csv(path);
    DatasetFile out;
    bool have_fs = false;
    for (const auto& c : csv.comments) {
        const std::string key = "# feature_set=";
        if (c.rfind(key, 0) == 0) {
            const std::string value = c.substr(key.size());
            const auto comma = value.find(',');
            if (comma == std::string::npos) fail("malformed_row", path + ": bad feature_set comment");
            out.feature_set = FeatureSet::parse(value.substr(0, comma), value.substr(comma + 1));
            have_fs = true;
        }
        const std::string clamped = "# clamped_rows=";
        if (c.rfind(clamped, 0) == 0) out.clamped_rows = static_cast<int>(parse_int(c.substr(clamped.size()), 0, "clamped_rows"));
    }
    if (!have_fs) fail("malformed_row", path + ": missing '# feature_set=' provenance comment");

    const int d = out.feature_set.feature_length();
    if (static_cast<int>(csv.header.fields.size()) != 3 + d)
        fail("malformed_row", path + ": expected " + std::to_string(3 + d) + " columns for feature set " +
                                  out.feature_set.to_string() + ", got " + std::to_string(csv.header.fields.size()));
    for (const auto& row : csv.rows) {
        ColocationSample s;
        s.primary_id = row.fields[0];
        s.interfering_id = row.fields[1];
        s.degradation = parse_real(row.fields[2], row.line_no, "degradation_pct");
        if (s.degradation < 0)
            fail("bad_argument", path + ":" + std::to_string(row.line_no) + ": negative degradation in dataset");
        s.features.reserve(d);
        for (int f = 0; f < d; ++f)
            s.features.push_back(parse_real(row.fields[3 + f], row.line_no, csv.header.fields[3 + f]));
        out.samples.push_back(std::move(s));
    }
    return out;
}

} // namespace cosched
