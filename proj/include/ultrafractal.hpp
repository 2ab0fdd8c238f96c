#pragma once

#include "ultrafractal/errors.hpp"
#include "ultrafractal/rational.hpp"
#include "ultrafractal/ordinal.hpp"
#include "ultrafractal/scattered.hpp"
#include "ultrafractal/report.hpp"
#include "ultrafractal/height_tree.hpp"
#include "ultrafractal/morphism.hpp"
#include "ultrafractal/point_set.hpp"
#include "ultrafractal/ifs.hpp"
#include "ultrafractal/glued.hpp"
#include "ultrafractal/export.hpp"
