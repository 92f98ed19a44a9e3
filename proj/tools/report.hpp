#pragma once

// JSON views of pipeline objects, shared by the CLI and its tests.

#include <filesystem>
#include <string>

#include "json.hpp"

#include "bipemb/embedder.hpp"
#include "bipemb/hamilton.hpp"
#include "bipemb/homomorphism.hpp"
#include "bipemb/partitioner.hpp"
#include "bipemb/regularity.hpp"

namespace bipemb::cli {

using Json = nlohmann::ordered_json;

/// Rationals are written as "p/q" (or "p") strings so they survive a round trip exactly.
std::string rational_json(const Rational & r);

Json vertex_json(VertexId v);
VertexId vertex_from_json(const Json & j);

Json vertex_set_json(const VertexSet & s);
Json certificate_json(const PairCertificate & c);
Json partition_json(const ClusterPartition & p);
ClusterPartition partition_from_json(const Json & j, std::size_t na, std::size_t nb);
Json reduced_json(const ReducedGraph & r);
Json schedule_json(const ParameterSchedule & s);
Json cycle_json(const HamiltonCycle & c);
HamiltonCycle cycle_from_json(const Json & j);
Json balance_json(const BalancingAssignment & b);
Json homomorphism_json(const CycleHomomorphism & h);
CycleHomomorphism homomorphism_from_json(const Json & j, std::size_t na, std::size_t nb);
Json homomorphism_report_json(const HomomorphismReport & r);
Json compatibility_json(const CompatibilityReport & c);
Json embedding_json(const Embedding & e);
Embedding embedding_from_json(const Json & j);
Json pipeline_report_json(const PipelineReport & r, bool timings);

Json read_json(const std::filesystem::path & path);
void write_json(const std::filesystem::path & path, const Json & j);

} // namespace bipemb::cli
