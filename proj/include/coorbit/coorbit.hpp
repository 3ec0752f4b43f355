#pragma once

#include <coorbit/common.hpp>
#include <coorbit/la.hpp>
#include <coorbit/grid.hpp>
#include <coorbit/frequency_set.hpp>
#include <coorbit/group.hpp>
#include <coorbit/signal.hpp>
#include <coorbit/window.hpp>
#include <coorbit/cover.hpp>
#include <coorbit/bapu.hpp>
#include <coorbit/transform.hpp>
#include <coorbit/norms.hpp>
#include <coorbit/frames.hpp>
#include <coorbit/quasinorm.hpp>
