#ifndef DUHEM_DUHEM_HPP
#define DUHEM_DUHEM_HPP

#include "accommodation.hpp"
#include "errors.hpp"
#include "geometry.hpp"
#include "integrator.hpp"
#include "models.hpp"
#include "signals.hpp"

#endif // DUHEM_DUHEM_HPP
