fn main() {
    std::process::exit(mpdecomp::cli::main_with_args(std::env::args_os()));
}
