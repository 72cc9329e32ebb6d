fn main() {
    std::process::exit(streamfn::cli::main_with_args(std::env::args_os()));
}
