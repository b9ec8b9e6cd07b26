// SPDX-License-Identifier: Apache-2.0
//
// starris: Green's-function channel model for metasurface RIS and STAR-RIS
// Copyright (C) 2026 The starris authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef STARRIS_ERRORS_HPP
#define STARRIS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace starris
{
    // Base class of every error raised by the library
    class error : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

#define STARRIS_DEFINE_ERROR(name)          \
    class name : public error               \
    {                                       \
    public:                                 \
        using error::error;                 \
    };

    STARRIS_DEFINE_ERROR(SingularPoint)           // Field and source point coincide, or a source lies inside the receiver
    STARRIS_DEFINE_ERROR(InvalidParameter)        // Out-of-domain scalar argument
    STARRIS_DEFINE_ERROR(DegenerateFrame)         // Local frame cannot be built (zero-length axis)
    STARRIS_DEFINE_ERROR(ParaxialDomainViolation) // Distance too short for the paraxial kernel
    STARRIS_DEFINE_ERROR(ConvergenceFailure)      // Iterative eigen-solver did not converge
    STARRIS_DEFINE_ERROR(DegenerateRegion)        // Reactive boundary not inside the radiating near field
    STARRIS_DEFINE_ERROR(InvalidGrouping)         // Element grouping is not a partition
    STARRIS_DEFINE_ERROR(RegimeMismatch)          // User lies on the wrong side of the field boundary
    STARRIS_DEFINE_ERROR(SingularAngle)           // Diffraction law evaluated on the shadow edge
    STARRIS_DEFINE_ERROR(MissingField)            // Scenario file lacks a required key
    STARRIS_DEFINE_ERROR(UnitError)               // Value without a valid unit suffix
    STARRIS_DEFINE_ERROR(RangeError)              // Value outside its admissible range

#undef STARRIS_DEFINE_ERROR

} // namespace starris

#endif
