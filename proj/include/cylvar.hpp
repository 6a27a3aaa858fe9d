#pragma once

#include "cylvar/error.hpp"
#include "cylvar/integrand.hpp"
#include "cylvar/audit.hpp"
#include "cylvar/mesh.hpp"
#include "cylvar/field.hpp"
#include "cylvar/energy.hpp"
#include "cylvar/solver.hpp"
#include "cylvar/asymptotics.hpp"
#include "cylvar/onedim.hpp"
#include "cylvar/io.hpp"
#include "cylvar/config.hpp"
#include "cylvar/app.hpp"
