#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "dtnav/worldsim.hpp"

namespace dtnav {

// World documents: {"bounds":{xmin,ymin,xmax,ymax},"goal":{x,y},"obstacles":[{cx,cy,width,height}]}
// plus an optional "start":{x,y,theta}.
nlohmann::json world_to_json(const World& world);
World world_from_json(const nlohmann::json& doc);

World load_world_file(const std::filesystem::path& path);
void save_world_file(const World& world, const std::filesystem::path& path);

}  // namespace dtnav
