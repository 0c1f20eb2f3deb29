#pragma once

#include "wgfem/basis.hpp"
#include "wgfem/common.hpp"
#include "wgfem/conforming.hpp"
#include "wgfem/geometry.hpp"
#include "wgfem/linsolve.hpp"
#include "wgfem/mesh.hpp"
#include "wgfem/mesh_io.hpp"
#include "wgfem/problems.hpp"
#include "wgfem/projection.hpp"
#include "wgfem/quadrature.hpp"
#include "wgfem/quality.hpp"
#include "wgfem/study.hpp"
#include "wgfem/wg.hpp"
