#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "vic/gmm.hpp"

namespace vic {

// Demo CSV layout: demo_id,t,x_<axis>...,xd_<axis>...,f_<axis>...
std::string format_demo_csv(const DemoDataset& data);
DemoDataset parse_demo_csv(const std::string& text, const std::string& source = "<string>");

void write_demo_csv(const std::filesystem::path& path, const DemoDataset& data);
DemoDataset read_demo_csv(const std::filesystem::path& path);

/// Concatenates datasets with matching axes, keeping demo ids.
DemoDataset merge_datasets(const std::vector<DemoDataset>& parts);

std::string mixture_to_json(const GaussianMixture& model);
GaussianMixture mixture_from_json(const std::string& text);
void write_mixture(const std::filesystem::path& path, const GaussianMixture& model);
GaussianMixture read_mixture(const std::filesystem::path& path);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace vic
