#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "floppy/control.hpp"
#include "floppy/loadpredict.hpp"
#include "floppy/network.hpp"
#include "floppy/nullspace.hpp"
#include "floppy/rigidify.hpp"
#include "floppy/springsim.hpp"

namespace floppy {

using Json = nlohmann::json;

// {"nodes":[{"id","x","y","fixed"}], "edges":[{"a","b","rest_length"}], "metadata":{}}
Json network_to_json(const Network& net);
// Schema problems throw "schema" naming the offending field; structural
// problems (self-loop, duplicate-edge, ...) keep their own codes.
Network network_from_json(const Json& j);

// {"method","seed","incomplete","modes":[{"size","tag","entries":[[index,value]]}]}
Json basis_to_json(const ModeBasis& basis);
ModeBasis basis_from_json(const Json& j, int coordinate_count);

Json sim_result_to_json(const SimResult& result);
Json globality_to_json(const GlobalityMap& g);
Json prediction_to_json(const Prediction& p, const PredictionReport* report = nullptr);
Json trace_to_json(const ControlTrace& trace);
Json sweep_to_json(const Sweep& sweep);

// step,mode,sign,distance,energy,step_size
void write_trace_csv(std::ostream& out, const ControlTrace& trace);
// step,added_a,added_b,G
void write_tuning_csv(std::ostream& out, const TuningRun& run);
// e,eta
void write_sweep_csv(std::ostream& out, const Sweep& sweep);

// Header edge_a,edge_b,extension. Raw extensions are divided by the
// boundary diameter to give the scaled values.
std::vector<EdgeExtension> read_extensions_csv(std::istream& in, const Network& net);

// Two-space indented dump with a trailing newline.
std::string dump(const Json& j);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
Network load_network(const std::string& path);
void save_network(const std::string& path, const Network& net);

}  // namespace floppy
