fn main() {
    std::process::exit(weqlab_cli::run(std::env::args_os()));
}
