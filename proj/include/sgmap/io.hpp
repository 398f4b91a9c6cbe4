#pragma once
// JSON document serialization for every public value type. Documents use
// fixed key order (insertion-ordered JSON) so reports are byte-reproducible;
// doubles round-trip exactly through the shortest representation.

#include <json.hpp>

#include <string>

#include "sgmap/analyze.hpp"
#include "sgmap/construct.hpp"
#include "sgmap/mesh.hpp"
#include "sgmap/reeb.hpp"
#include "sgmap/region.hpp"

namespace sgmap {

using Doc = nlohmann::ordered_json;

Doc to_doc(const MultiPoly& p);
MultiPoly multipoly_from_doc(const Doc& d);

Doc to_doc(const UniPoly& p);
UniPoly unipoly_from_doc(const Doc& d);

Doc to_doc(const Box& b);
Box box_from_doc(const Doc& d);

Doc to_doc(const Region& r);
Region region_from_doc(const Doc& d);

Doc to_doc(const VerticalSpec& s);
VerticalSpec vertical_spec_from_doc(const Doc& d);

Doc to_doc(const Hypersurface& h);
Hypersurface hypersurface_from_doc(const Doc& d);

Doc to_doc(const RegionCertificate& c);
Doc to_doc(const SpecValidation& v);
Doc to_doc(const NonsingularReport& r);
Doc to_doc(const SingularSetReport& r);
Doc to_doc(const FiberReport& r);
Doc to_doc(const FiberSuiteReport& r);
Doc to_doc(const CollarReport& r);
Doc to_doc(const ReebGraph& g);

/// {"vertices": V, "edges": E, "faces": F, "euler": chi, "components": c}
Doc mesh_summary(const Mesh& m);

/// Job configuration: region, optional vertical_spec, k, resolutions, seed.
struct JobConfig {
  Region region;
  std::optional<VerticalSpec> vspec;
  int k = 1;
  int mesh_res = 96;
  int sweep_res = 256;
  int samples = 1000;
  uint64_t seed = 1;
};

Doc to_doc(const JobConfig& c);
JobConfig jobconfig_from_doc(const Doc& d);

Doc load_doc(const std::string& path);
void write_doc(const Doc& d, const std::string& path);

std::string iso_timestamp();

}  // namespace sgmap
