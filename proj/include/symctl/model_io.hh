/*
 * model_io.hh
 *
 * The "STS 1" model file and DOT export.
 *
 *   STS 1 <states> <inputs> <transitions>
 *   S <id> <lower...> <upper...> <q...>      cell states
 *   C <id> <lower...> <upper...> <q...>      partition cells of a tube model
 *   T <id> <knot cell ids...>                tube states (tube 0 is initial)
 *   I <id> <u...>
 *   E <src> <input> <dst>
 *
 * Numbers are printed with 9 significant digits; records are sorted by id.
 */

#ifndef SYMCTL_MODEL_IO_HH_
#define SYMCTL_MODEL_IO_HH_

#include <string>

#include "symctl/abstraction.hh"

namespace symctl {

std::string serialize_model(const TransitionSystem& ts);
/* throws IoError on malformed input */
TransitionSystem parse_model(const std::string& text);

std::string to_dot(const TransitionSystem& ts);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

} // namespace symctl

#endif
