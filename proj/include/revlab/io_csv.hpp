#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "revlab/errors.hpp"

namespace revlab {

// CSV writer; every file starts with a comment header carrying the config
// hash so outputs are traceable to the exact run configuration.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::string& header_comment,
              const std::vector<std::string>& columns)
        : os_(path, std::ios::trunc) {
        if (!os_) throw NumericalError("cannot open " + path);
        os_ << "# " << header_comment << "\n";
        for (std::size_t i = 0; i < columns.size(); ++i)
            os_ << columns[i] << (i + 1 < columns.size() ? "," : "");
        os_ << "\n";
    }

    void row(const std::vector<double>& values) {
        char buf[64];
        for (std::size_t i = 0; i < values.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.12g", values[i]);
            os_ << buf << (i + 1 < values.size() ? "," : "");
        }
        os_ << "\n";
    }

    void raw_row(const std::string& line) { os_ << line << "\n"; }

private:
    std::ofstream os_;
};

}  // namespace revlab
