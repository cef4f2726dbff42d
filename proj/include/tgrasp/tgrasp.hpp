#ifndef TGRASP_TGRASP_HPP
#define TGRASP_TGRASP_HPP

#include "tgrasp/errors.hpp"
#include "tgrasp/random.hpp"
#include "tgrasp/fingertip.hpp"
#include "tgrasp/signal.hpp"
#include "tgrasp/contact.hpp"
#include "tgrasp/control.hpp"
#include "tgrasp/plant.hpp"
#include "tgrasp/config.hpp"
#include "tgrasp/messages.hpp"
#include "tgrasp/bus.hpp"
#include "tgrasp/log.hpp"
#include "tgrasp/stages.hpp"
#include "tgrasp/harness.hpp"
#include "tgrasp/colormap.hpp"
#include "tgrasp/calibration.hpp"

#endif // TGRASP_TGRASP_HPP
